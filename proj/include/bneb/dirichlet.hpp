#ifndef BNEB_DIRICHLET_HPP
#define BNEB_DIRICHLET_HPP

#include <cstdint>
#include <span>
#include <vector>

#include "bneb/model.hpp"
#include "bneb/rng.hpp"

namespace bneb {

/// Pseudocounts alpha_{v,x|f} > 0 for every CPTable row.
struct DirichletCPT {
	FamilyTable<double> alpha;

	/// alpha_{v,.|f}
	double row_total(const Network& net, VarIndex v, std::size_t f) const;
	/// mu_{v,x|f} for every entry.
	CptParams mean(const Network& net) const;
};

/// Family counts m_{v,x|f} over a complete dataset of `records` cases.
struct CountTable {
	FamilyTable<std::int64_t> counts;
	std::int64_t records = 0;
};

/// alpha* = 1 everywhere.
DirichletCPT uniform_prior(const Network& net);

/// Throws ShapeMismatch or NonPositiveAlpha.
void validate_dirichlet(const Network& net, const DirichletCPT& prior);

/// Throws IncompleteRecord.
CountTable count_statistics(const Network& net, const Dataset& data);

/// alpha = alpha* + m. Throws ShapeMismatch.
DirichletCPT posterior(const Network& net, const DirichletCPT& prior, const CountTable& counts);

/// mu_x = alpha_x / alpha_. ; throws NonPositiveAlpha.
std::vector<double> row_mean(std::span<const double> alpha);

/// Cov(x, y) = mu_x (delta_xy - mu_y) / (alpha_. + 1), row-major k*k.
std::vector<double> row_covariance(std::span<const double> alpha);

/// One Dirichlet(alpha) draw from normalized Gamma(alpha_x, 1) variates.
std::vector<double> sample_row(std::span<const double> alpha, Rng& rng);

/// Independent sample_row for every (v, f), in variable then configuration order.
CptParams sample_cpts(const Network& net, const DirichletCPT& dist, Rng& rng);

}  // namespace bneb

#endif  // BNEB_DIRICHLET_HPP
