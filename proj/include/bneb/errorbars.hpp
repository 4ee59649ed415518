#ifndef BNEB_ERRORBARS_HPP
#define BNEB_ERRORBARS_HPP

#include <cstddef>
#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "bneb/dirichlet.hpp"
#include "bneb/inference.hpp"
#include "bneb/model.hpp"

namespace bneb {

struct Interval {
	double lower = 0.0;
	double upper = 0.0;
	double width() const noexcept { return upper - lower; }
};

struct CredibleInterval {
	double delta = 0.0;
	double z = 0.0;
	Interval raw;      // mu +- z sigma
	Interval clamped;  // raw intersected with [0, 1]
};

/// Variance contribution of one CPTable row.
struct RowContribution {
	VarIndex node = 0;
	std::size_t config = 0;
	double a = 0.0;
	double b = 0.0;
	double value = 0.0;  // (A - B) / (alpha_{v,.|f} + 1)
};

struct QueryEstimate {
	double mean = 0.0;
	double variance = 0.0;
	double std_dev = 0.0;
	std::vector<RowContribution> contributions;
	std::vector<CredibleInterval> intervals;
	/// Rows whose A - B came out slightly negative and were clamped to 0.
	std::size_t clamped_rows = 0;
};

/// Cancellation allowance on A - B before a negative row is treated as a bug.
inline constexpr double kNegativeContributionTolerance = 1e-15;

///
/// \brief Delta-method posterior mean and variance of Pr{H=h | E=e}.
///
/// Evaluates mu = E{Theta}, then
///   A_vf = sum_x {p_v(h,x,f|e) - p(h|e) p_v(x,f|e)}^2 / mu_{v,x|f}
///   B_vf = {p_v(h,f|e) - p(h|e) p_v(f|e)}^2
///   var  = sum_{v,f} (A_vf - B_vf) / (alpha_{v,.|f} + 1).
/// Throws ZeroEvidenceProbability, NegativeContribution.
///
QueryEstimate delta_variance(const Network& net, const DirichletCPT& post, const Query& q,
                             const EliminationOrder& order);
QueryEstimate delta_variance(const Network& net, const DirichletCPT& post, const Query& q);

/// Same, reusing marginal passes already computed at mu = E{Theta}.
QueryEstimate delta_variance(const Network& net, const DirichletCPT& post, const CptParams& mu,
                             const QuerySensitivity& sens);

/// Step used by the finite-difference oracles.
inline constexpr double kFiniteDifferenceStep = 1e-6;

/// Central differences of Pr{h,e}/Pr{e} under single-entry perturbations, no renormalization.
FamilyTable<double> finite_difference_derivatives(const Network& net, const CptParams& params, const Query& q,
                                                  const EliminationOrder& order,
                                                  double step = kFiniteDifferenceStep);

///
/// \brief Var(D) the slow way: finite-difference derivatives contracted with
/// every row's full Dirichlet covariance matrix.
///
double delta_variance_oracle(const Network& net, const DirichletCPT& post, const Query& q,
                             const EliminationOrder& order);
double delta_variance_oracle(const Network& net, const DirichletCPT& post, const Query& q);

/// Standard normal CDF.
double normal_cdf(double x);

/// Inverse standard normal CDF; throws OutOfDomain unless 0 < p < 1.
double normal_quantile(double p);

/// z_{delta/2} = Phi^{-1}(1 - delta/2).
double two_sided_z(double delta);

/// mu +- z_{delta/2} sigma, raw and clamped. Throws OutOfDomain.
CredibleInterval credible_interval(double mean, double sigma, double delta);

/// Appends one interval per delta to the estimate.
void attach_intervals(QueryEstimate& est, std::span<const double> deltas);

/// Beta(a, b) law of Q under one Dirichlet over the full joint.
struct BetaParams {
	double a = 0.0;
	double b = 0.0;
	double mean() const noexcept { return a / (a + b); }
	double variance() const noexcept { return a * b / ((a + b) * (a + b) * (a + b + 1.0)); }
};

/// Joint cells are laid out as in brute_force_joint. Throws EmptyEvidenceSupport, ShapeMismatch.
BetaParams exact_beta_aggregation(const Network& net, std::span<const double> joint_alpha, const Query& q);

///
/// \brief Closed-form posterior variance for a complete structure under a
/// uniform prior on the joint:
///   P(H|E) (1 - P(H|E)) / (m P(E) + 3),
/// with P the posterior-expected probabilities. `joint_counts` follows the
/// brute_force_joint layout. Throws PreconditionViolation.
///
double exact_complete_graph_variance(const Network& net, std::span<const std::int64_t> joint_counts,
                                     std::int64_t m, const Query& q);

/// Joint-cell counts of a dataset in the brute_force_joint layout.
std::vector<std::int64_t> joint_counts(const Network& net, const Dataset& data);

}  // namespace bneb

#endif  // BNEB_ERRORBARS_HPP
