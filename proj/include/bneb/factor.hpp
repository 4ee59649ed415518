#ifndef BNEB_FACTOR_HPP
#define BNEB_FACTOR_HPP

#include <cstddef>
#include <span>
#include <vector>

#include "bneb/model.hpp"

namespace bneb {

///
/// \brief Dense nonnegative table over an ascending list of variables.
///
/// Row-major: the last variable of the scope varies fastest. An empty scope
/// holds a single scalar.
///
struct Factor {
	std::vector<VarIndex> scope;
	std::vector<std::size_t> card;
	std::vector<double> table;

	Factor() : table(1, 1.0) {}
	Factor(std::vector<VarIndex> scope_, std::vector<std::size_t> card_);

	std::size_t size() const noexcept { return table.size(); }
	double scalar() const { return table.at(0); }
};

/// Ascending union of the scopes of the given factors.
std::vector<VarIndex> scope_union(std::span<const Factor* const> factors);

///
/// \brief Multiplies the inputs over `scope` and sums the product down to `keep`.
///
/// `keep` must be an ascending subset of `scope`, and every input's scope a
/// subset of `scope`. With keep == scope this is a plain product; with a single
/// input it is marginalization.
///
Factor product_sum(std::span<const VarIndex> scope, std::span<const std::size_t> card,
                   std::span<const Factor* const> inputs, std::span<const VarIndex> keep);

}  // namespace bneb

#endif  // BNEB_FACTOR_HPP
