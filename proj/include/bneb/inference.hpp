#ifndef BNEB_INFERENCE_HPP
#define BNEB_INFERENCE_HPP

#include <cstddef>
#include <span>
#include <vector>

#include "bneb/model.hpp"
#include "bneb/rng.hpp"

namespace bneb {

/// Sizes observed while running bucket elimination.
struct EliminationStats {
	std::size_t max_scope = 0;   // largest bucket scope |U_i|
	std::size_t peak_table = 0;  // largest bucket table, prod of cardinalities over U_i
};

/// Pr{x, f, e} for every (v, x, f), plus Pr{e}.
struct FamilyMarginalTable {
	double evidence_prob = 0.0;
	FamilyTable<double> joint;
};

/// Product of the CPT entries selected by a full assignment. Throws IncompleteAssignment.
double joint_eval(const Network& net, const CptParams& params, const Assignment& full);
double joint_eval(const Network& net, const CptParams& params, std::span<const StateIndex> full);

///
/// \brief Pr{e} by bucket elimination over evidence-sliced CPTables.
///
/// The network polynomial is evaluated as-is: unnormalized ("free") rows are
/// not renormalized, so the result is multilinear in every entry. Impossible
/// evidence yields 0.
///
double prob_evidence(const Network& net, const CptParams& params, const Assignment& evidence,
                     const EliminationOrder& order, EliminationStats* stats = nullptr);
double prob_evidence(const Network& net, const CptParams& params, const Assignment& evidence);

///
/// \brief Un-normalized family marginals Pr{X_v = x, F_v = f, e} for all nodes.
///
/// One forward and one backward sweep over the bucket tree induced by `order`.
///
FamilyMarginalTable family_marginals(const Network& net, const CptParams& params, const Assignment& evidence,
                                     const EliminationOrder& order, EliminationStats* stats = nullptr);
FamilyMarginalTable family_marginals(const Network& net, const CptParams& params, const Assignment& evidence);

/// Pr{h, e} / Pr{e}; throws ZeroEvidenceProbability when Pr{e} = 0.
double query_mean(const Network& net, const CptParams& mu, const Query& q, const EliminationOrder& order);
double query_mean(const Network& net, const CptParams& mu, const Query& q);

///
/// \brief Everything the derivative identity needs, from two marginal passes.
///
/// `with_e` holds Pr{x, f, e}; `with_he` holds Pr{h, x, f, e}.
///
struct QuerySensitivity {
	FamilyMarginalTable with_e;
	FamilyMarginalTable with_he;

	double prob_e() const noexcept { return with_e.evidence_prob; }
	double prob_he() const noexcept { return with_he.evidence_prob; }
	double mean() const noexcept { return prob_he() / prob_e(); }
};

/// Throws ZeroEvidenceProbability.
QuerySensitivity query_sensitivity(const Network& net, const CptParams& mu, const Query& q,
                                   const EliminationOrder& order);

///
/// \brief q'_{v,x|f}: partial derivatives of Pr{h,e}/Pr{e} in each free CPT entry.
///
/// q' = [p_v(h,x,f|e) - p(h|e) p_v(x,f|e)] / mu_{v,x|f}. Throws
/// ZeroEvidenceProbability and ZeroParameter.
///
FamilyTable<double> query_derivatives(const Network& net, const CptParams& mu, const QuerySensitivity& sens);
FamilyTable<double> query_derivatives(const Network& net, const CptParams& mu, const Query& q,
                                      const EliminationOrder& order);
FamilyTable<double> query_derivatives(const Network& net, const CptParams& mu, const Query& q);

/// m complete records drawn ancestrally in topological order. Throws RowNotNormalized.
Dataset forward_sample(const Network& net, const CptParams& params, std::size_t m, Rng& rng);

/// Largest joint state space brute_force_joint accepts.
inline constexpr std::size_t kBruteForceLimit = std::size_t{1} << 20;

///
/// \brief Full joint table by enumeration; the first variable is the most
/// significant digit. Throws StateSpaceTooLarge.
///
std::vector<double> brute_force_joint(const Network& net, const CptParams& params);

/// State vector of a joint-table index (inverse of the brute-force layout).
std::vector<StateIndex> joint_states(const Network& net, std::size_t index);

}  // namespace bneb

#endif  // BNEB_INFERENCE_HPP
