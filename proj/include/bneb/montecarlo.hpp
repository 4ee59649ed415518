#ifndef BNEB_MONTECARLO_HPP
#define BNEB_MONTECARLO_HPP

#include <cstddef>
#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "bneb/dirichlet.hpp"
#include "bneb/model.hpp"

namespace bneb {

/// Posterior draws Q_i = q(Theta_i) for one query.
struct QuerySamples {
	std::vector<double> values;
	/// Replicates dropped because Pr{e} underflowed to 0 at Theta_i.
	std::size_t zero_evidence = 0;
};

///
/// \brief Draws r replicates Theta_i from the posterior and evaluates every
/// query at each of them.
///
/// Replicate i uses the stream Rng::derive(seed, {i}), so the output depends
/// only on the seed, never on `threads`.
///
std::vector<QuerySamples> posterior_query_samples(const Network& net, const DirichletCPT& post,
                                                  std::span<const Query> queries, std::size_t r,
                                                  std::uint64_t seed, unsigned threads = 1);
QuerySamples posterior_query_samples(const Network& net, const DirichletCPT& post, const Query& q, std::size_t r,
                                     std::uint64_t seed, unsigned threads = 1);

/// Proportion of samples with |Q_i - mu| > z_{delta/2} sigma (raw interval, strict).
double coverage_deviation(std::span<const double> samples, double mean, double sigma, double delta);

/// 100 * mean |dhat - delta|, or 100 * mean (dhat - delta) when `signed_score`.
double validity(std::span<const double> deltas_hat, double delta, bool signed_score = false);

struct GoldStandard {
	double mean = 0.0;
	double std_dev = 0.0;
};

/// Exact mean and std of 100 |Dhat - delta| when r Dhat ~ Binomial(r, delta).
GoldStandard gold_standard(double delta, std::size_t r = 100);

struct QQResult {
	/// (standard normal quantile at (i - 0.5)/r, i-th smallest z-score)
	std::vector<std::pair<double, double>> points;
	double correlation = 0.0;
};

/// Throws DegenerateSample for fewer than 2 samples or zero spread.
QQResult qq_points(std::span<const double> samples);

struct CoverageReport {
	std::size_t query_id = 0;
	double delta = 0.0;
	std::size_t r = 0;
	double delta_hat = 0.0;
	double mean = 0.0;
	double sigma = 0.0;
	std::uint64_t seed = 0;
};

}  // namespace bneb

#endif  // BNEB_MONTECARLO_HPP
