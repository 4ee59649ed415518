#include "bneb/factor.hpp"

#include <algorithm>
#include <cassert>
#include <iterator>

namespace bneb {

Factor::Factor(std::vector<VarIndex> scope_, std::vector<std::size_t> card_)
	: scope(std::move(scope_)), card(std::move(card_)) {
	std::size_t n = 1;
	for (std::size_t k : card)
		n *= k;
	table.assign(n, 0.0);
}

std::vector<VarIndex> scope_union(std::span<const Factor* const> factors) {
	std::vector<VarIndex> out;
	for (const Factor* f : factors) {
		std::vector<VarIndex> merged;
		merged.reserve(out.size() + f->scope.size());
		std::set_union(out.begin(), out.end(), f->scope.begin(), f->scope.end(), std::back_inserter(merged));
		out.swap(merged);
	}
	return out;
}

namespace {

// Strides of `sub` (ascending, row-major) laid out along the positions of `scope`.
void strides_along(std::span<const VarIndex> scope, std::span<const VarIndex> sub,
                   std::span<const std::size_t> sub_card, std::size_t* out) {
	std::size_t stride = 1;
	std::size_t j = scope.size();
	for (std::size_t i = sub.size(); i-- > 0;) {
		while (j > 0 && scope[j - 1] != sub[i]) {
			out[j - 1] = 0;
			--j;
		}
		assert(j > 0 && "factor scope is not a subset");
		out[j - 1] = stride;
		stride *= sub_card[i];
		--j;
	}
	while (j > 0)
		out[--j] = 0;
}

}  // namespace

Factor product_sum(std::span<const VarIndex> scope, std::span<const std::size_t> card,
                   std::span<const Factor* const> inputs, std::span<const VarIndex> keep) {
	const std::size_t n = scope.size();
	const std::size_t k = inputs.size();

	std::vector<std::size_t> keep_card;
	keep_card.reserve(keep.size());
	for (std::size_t i = 0, j = 0; i < keep.size(); ++i) {
		while (scope[j] != keep[i])
			++j;
		keep_card.push_back(card[j]);
	}
	Factor out(std::vector<VarIndex>(keep.begin(), keep.end()), keep_card);

	// strides[(input)*n + position]; the output uses slot k.
	std::vector<std::size_t> strides((k + 1) * n);
	for (std::size_t i = 0; i < k; ++i)
		strides_along(scope, inputs[i]->scope, inputs[i]->card, strides.data() + i * n);
	strides_along(scope, out.scope, out.card, strides.data() + k * n);

	std::vector<std::size_t> idx(k + 1, 0);
	std::vector<std::size_t> counter(n, 0);
	std::vector<const double*> tables(k);
	for (std::size_t i = 0; i < k; ++i)
		tables[i] = inputs[i]->table.data();
	double* dst = out.table.data();

	std::size_t total = 1;
	for (std::size_t c : card)
		total *= c;

	for (std::size_t t = 0; t < total; ++t) {
		double p = 1.0;
		for (std::size_t i = 0; i < k; ++i)
			p *= tables[i][idx[i]];
		dst[idx[k]] += p;

		for (std::size_t j = n; j-- > 0;) {
			if (++counter[j] < card[j]) {
				for (std::size_t i = 0; i <= k; ++i)
					idx[i] += strides[i * n + j];
				break;
			}
			counter[j] = 0;
			for (std::size_t i = 0; i <= k; ++i)
				idx[i] -= strides[i * n + j] * (card[j] - 1);
		}
	}
	return out;
}

}  // namespace bneb
