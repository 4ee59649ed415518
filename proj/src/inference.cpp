#include "bneb/inference.hpp"

#include <algorithm>
#include <cassert>
#include <limits>

#include "bneb/factor.hpp"

namespace bneb {

double joint_eval(const Network& net, const CptParams& params, std::span<const StateIndex> full) {
	if (full.size() != net.size())
		throw IncompleteAssignment("expected " + std::to_string(net.size()) + " states, got " +
		                           std::to_string(full.size()));
	double p = 1.0;
	for (VarIndex v = 0; v < net.size(); ++v)
		p *= cpt_entry(net, params, v, full);
	return p;
}

double joint_eval(const Network& net, const CptParams& params, const Assignment& full) {
	std::vector<StateIndex> states(net.size());
	for (VarIndex v = 0; v < net.size(); ++v) {
		auto s = full.get(v);
		if (!s)
			throw IncompleteAssignment(net.variable(v).name + " is unbound");
		states[v] = *s;
	}
	return joint_eval(net, params, states);
}

namespace {

constexpr std::ptrdiff_t kInconsistent = -1;

///
/// Maps every entry of v's flattened CPTable onto the evidence-sliced factor
/// over the free family members, or kInconsistent when the entry contradicts
/// the evidence.
///
struct FamilySlice {
	Factor shape;                       // scope and cardinalities; table unused
	std::vector<std::ptrdiff_t> index;  // per CPT entry
};

FamilySlice slice_family(const Network& net, VarIndex v, const Assignment& evidence) {
	// CPT layout digits: parents in declaration order, then v (least significant).
	std::vector<VarIndex> digits = net.parents(v);
	digits.push_back(v);

	std::vector<VarIndex> free;
	for (VarIndex d : digits)
		if (!evidence.contains(d))
			free.push_back(d);
	std::sort(free.begin(), free.end());
	std::vector<std::size_t> free_card;
	for (VarIndex d : free)
		free_card.push_back(net.cardinality(d));

	FamilySlice out{Factor(free, free_card), {}};

	// Stride of each layout digit within the sliced factor (0 for evidence).
	const std::size_t nd = digits.size();
	std::vector<std::size_t> stride(nd, 0), card(nd);
	std::vector<std::ptrdiff_t> fixed(nd, -1);
	for (std::size_t i = 0; i < nd; ++i) {
		card[i] = net.cardinality(digits[i]);
		if (auto s = evidence.get(digits[i])) {
			fixed[i] = static_cast<std::ptrdiff_t>(*s);
			continue;
		}
		std::size_t st = 1;
		for (std::size_t j = free.size(); j-- > 0 && free[j] != digits[i];)
			st *= free_card[j];
		stride[i] = st;
	}

	out.index.resize(net.table_size(v));
	std::vector<std::size_t> counter(nd, 0);
	for (std::size_t t = 0; t < out.index.size(); ++t) {
		std::size_t target = 0;
		bool ok = true;
		for (std::size_t i = 0; i < nd; ++i) {
			if (fixed[i] >= 0 && counter[i] != static_cast<std::size_t>(fixed[i])) {
				ok = false;
				break;
			}
			target += counter[i] * stride[i];
		}
		out.index[t] = ok ? static_cast<std::ptrdiff_t>(target) : kInconsistent;
		for (std::size_t i = nd; i-- > 0;) {
			if (++counter[i] < card[i])
				break;
			counter[i] = 0;
		}
	}
	return out;
}

struct Bucket {
	VarIndex var = 0;
	std::vector<std::size_t> originals;  // node ids whose sliced CPT lives here
	std::vector<std::size_t> children;   // bucket ids sending messages here
	std::vector<VarIndex> scope;
	std::vector<std::size_t> card;
	Factor message;  // lambda, sent to the parent bucket (or the root)
	std::ptrdiff_t parent = -1;
	Factor down;  // pi, received from the parent (or the root)
};

class BucketTree {
public:
	BucketTree(const Network& net, const CptParams& params, const Assignment& evidence,
	           const EliminationOrder& order, EliminationStats* stats)
		: net_(net) {
		if (!params.matches(net))
			throw ShapeMismatch("CPTables do not match the network");
		const std::size_t n = net.size();

		slices_.reserve(n);
		factors_.reserve(n);
		for (VarIndex v = 0; v < n; ++v) {
			slices_.push_back(slice_family(net, v, evidence));
			Factor f = slices_.back().shape;
			const auto& table = params.tables[v];
			for (std::size_t i = 0; i < table.size(); ++i)
				if (slices_.back().index[i] != kInconsistent)
					f.table[slices_.back().index[i]] = table[i];
			factors_.push_back(std::move(f));
		}

		std::vector<std::size_t> pos(n, std::numeric_limits<std::size_t>::max());
		for (VarIndex v : order.order)
			if (!evidence.contains(v)) {
				pos[v] = buckets_.size();
				buckets_.emplace_back().var = v;
			}

		auto home = [&](const std::vector<VarIndex>& scope) {
			std::size_t best = std::numeric_limits<std::size_t>::max();
			for (VarIndex u : scope)
				best = std::min(best, pos[u]);
			return best;
		};

		for (VarIndex v = 0; v < n; ++v) {
			if (factors_[v].scope.empty()) {
				constant_nodes_.push_back(v);
				continue;
			}
			const std::size_t b = home(factors_[v].scope);
			assert(b < buckets_.size() && "elimination order misses a free variable");
			buckets_[b].originals.push_back(v);
		}

		EliminationStats local;
		for (std::size_t i = 0; i < buckets_.size(); ++i) {
			Bucket& bk = buckets_[i];
			std::vector<const Factor*> inputs = collect(i, std::nullopt, false);
			assert(!inputs.empty());
			bk.scope = scope_union(inputs);
			for (VarIndex u : bk.scope)
				bk.card.push_back(net.cardinality(u));

			std::vector<VarIndex> keep;
			for (VarIndex u : bk.scope)
				if (u != bk.var)
					keep.push_back(u);
			bk.message = product_sum(bk.scope, bk.card, inputs, keep);

			local.max_scope = std::max(local.max_scope, bk.scope.size());
			std::size_t sz = 1;
			for (std::size_t c : bk.card)
				sz *= c;
			local.peak_table = std::max(local.peak_table, sz);

			if (keep.empty()) {
				roots_.push_back(i);
			} else {
				bk.parent = static_cast<std::ptrdiff_t>(home(keep));
				buckets_[bk.parent].children.push_back(i);
			}
		}
		if (stats)
			*stats = local;

		evidence_prob_ = 1.0;
		for (std::size_t v : constant_nodes_)
			evidence_prob_ *= factors_[v].scalar();
		for (std::size_t r : roots_)
			evidence_prob_ *= buckets_[r].message.scalar();
	}

	double evidence_prob() const noexcept { return evidence_prob_; }

	FamilyMarginalTable marginals() {
		// Root buckets receive the product of every other independent component.
		for (std::size_t r : roots_) {
			double pi = 1.0;
			for (std::size_t v : constant_nodes_)
				pi *= factors_[v].scalar();
			for (std::size_t s : roots_)
				if (s != r)
					pi *= buckets_[s].message.scalar();
			buckets_[r].down = Factor();
			buckets_[r].down.table[0] = pi;
		}

		FamilyMarginalTable out{evidence_prob_, FamilyTable<double>(net_, 0.0)};

		for (std::size_t i = buckets_.size(); i-- > 0;) {
			Bucket& bk = buckets_[i];
			for (std::size_t c : bk.children) {
				auto inputs = collect(i, c, true);
				buckets_[c].down = product_sum(bk.scope, bk.card, inputs, buckets_[c].message.scope);
			}
			auto inputs = collect(i, std::nullopt, true);
			const Factor belief = product_sum(bk.scope, bk.card, inputs, bk.scope);
			const Factor* b = &belief;
			for (std::size_t v : bk.originals) {
				const Factor marg = product_sum(bk.scope, bk.card, std::span(&b, 1), factors_[v].scope);
				scatter(v, marg);
			}
		}
		for (std::size_t v : constant_nodes_) {
			Factor marg;
			marg.table[0] = evidence_prob_;
			scatter(v, marg);
		}

		for (VarIndex v = 0; v < net_.size(); ++v)
			out.joint.tables[v] = std::move(scattered_[v]);
		return out;
	}

private:
	std::vector<const Factor*> collect(std::size_t i, std::optional<std::size_t> skip_child, bool with_down) const {
		const Bucket& bk = buckets_[i];
		std::vector<const Factor*> inputs;
		inputs.reserve(bk.originals.size() + bk.children.size() + 1);
		for (std::size_t v : bk.originals)
			inputs.push_back(&factors_[v]);
		for (std::size_t c : bk.children)
			if (c != skip_child)
				inputs.push_back(&buckets_[c].message);
		if (with_down)
			inputs.push_back(&bk.down);
		return inputs;
	}

	void scatter(std::size_t v, const Factor& marg) {
		if (scattered_.empty())
			scattered_.resize(net_.size());
		const auto& index = slices_[v].index;
		auto& dst = scattered_[v];
		dst.assign(index.size(), 0.0);
		for (std::size_t i = 0; i < index.size(); ++i)
			if (index[i] != kInconsistent)
				dst[i] = marg.table[index[i]];
	}

	const Network& net_;
	std::vector<FamilySlice> slices_;
	std::vector<Factor> factors_;
	std::vector<Bucket> buckets_;
	std::vector<std::size_t> constant_nodes_;
	std::vector<std::size_t> roots_;
	std::vector<std::vector<double>> scattered_;
	double evidence_prob_ = 0.0;
};

void check_evidence(const Network& net, const Assignment& evidence) {
	for (const auto& [v, s] : evidence)
		if (v >= net.size() || s >= net.cardinality(v))
			throw UnknownVariable("assignment does not fit the network");
}

}  // namespace

double prob_evidence(const Network& net, const CptParams& params, const Assignment& evidence,
                     const EliminationOrder& order, EliminationStats* stats) {
	check_evidence(net, evidence);
	return BucketTree(net, params, evidence, order, stats).evidence_prob();
}

double prob_evidence(const Network& net, const CptParams& params, const Assignment& evidence) {
	return prob_evidence(net, params, evidence, min_fill_order(net));
}

FamilyMarginalTable family_marginals(const Network& net, const CptParams& params, const Assignment& evidence,
                                     const EliminationOrder& order, EliminationStats* stats) {
	check_evidence(net, evidence);
	return BucketTree(net, params, evidence, order, stats).marginals();
}

FamilyMarginalTable family_marginals(const Network& net, const CptParams& params, const Assignment& evidence) {
	return family_marginals(net, params, evidence, min_fill_order(net));
}

double query_mean(const Network& net, const CptParams& mu, const Query& q, const EliminationOrder& order) {
	const double pe = prob_evidence(net, mu, q.evidence, order);
	if (!(pe > 0.0))
		throw ZeroEvidenceProbability("Pr{e} = 0 at the given parameters");
	return prob_evidence(net, mu, q.evidence.merged(q.hypothesis), order) / pe;
}

double query_mean(const Network& net, const CptParams& mu, const Query& q) {
	return query_mean(net, mu, q, min_fill_order(net));
}

QuerySensitivity query_sensitivity(const Network& net, const CptParams& mu, const Query& q,
                                   const EliminationOrder& order) {
	QuerySensitivity s;
	s.with_e = family_marginals(net, mu, q.evidence, order);
	if (!(s.with_e.evidence_prob > 0.0))
		throw ZeroEvidenceProbability("Pr{e} = 0 at the given parameters");
	s.with_he = family_marginals(net, mu, q.evidence.merged(q.hypothesis), order);
	return s;
}

FamilyTable<double> query_derivatives(const Network& net, const CptParams& mu, const QuerySensitivity& sens) {
	const double pe = sens.prob_e();
	const double q = sens.mean();
	FamilyTable<double> d(net, 0.0);
	for (VarIndex v = 0; v < net.size(); ++v)
		for (std::size_t i = 0; i < d.tables[v].size(); ++i) {
			const double theta = mu.tables[v][i];
			if (!(theta > 0.0))
				throw ZeroParameter(net.variable(v).name + " entry " + std::to_string(i) + " is zero");
			const double p_hxf = sens.with_he.joint.tables[v][i] / pe;
			const double p_xf = sens.with_e.joint.tables[v][i] / pe;
			d.tables[v][i] = (p_hxf - q * p_xf) / theta;
		}
	return d;
}

FamilyTable<double> query_derivatives(const Network& net, const CptParams& mu, const Query& q,
                                      const EliminationOrder& order) {
	return query_derivatives(net, mu, query_sensitivity(net, mu, q, order));
}

FamilyTable<double> query_derivatives(const Network& net, const CptParams& mu, const Query& q) {
	return query_derivatives(net, mu, q, min_fill_order(net));
}

Dataset forward_sample(const Network& net, const CptParams& params, std::size_t m, Rng& rng) {
	validate_params(net, params);
	Dataset data;
	data.records.reserve(m);
	std::vector<StateIndex> rec(net.size());
	for (std::size_t i = 0; i < m; ++i) {
		for (VarIndex v : net.topo_order()) {
			std::size_t f = 0;
			for (VarIndex p : net.parents(v))
				f = f * net.cardinality(p) + rec[p];
			const auto row = params.row(net, v, f);
			const double u = rng.uniform();
			double acc = 0.0;
			StateIndex s = row.size() - 1;
			for (StateIndex x = 0; x < row.size(); ++x) {
				acc += row[x];
				if (u < acc) {
					s = x;
					break;
				}
			}
			// Rounding can leave u above the last partial sum; skip zero-mass tail states.
			while (row[s] == 0.0 && s > 0)
				--s;
			rec[v] = s;
		}
		data.records.push_back(rec);
	}
	return data;
}

std::vector<StateIndex> joint_states(const Network& net, std::size_t index) {
	std::vector<StateIndex> states(net.size());
	for (VarIndex v = net.size(); v-- > 0;) {
		states[v] = index % net.cardinality(v);
		index /= net.cardinality(v);
	}
	return states;
}

std::vector<double> brute_force_joint(const Network& net, const CptParams& params) {
	const std::size_t total = net.joint_size();
	if (total > kBruteForceLimit)
		throw StateSpaceTooLarge("joint state space exceeds 2^20 cells");
	std::vector<double> joint(total);
	std::vector<StateIndex> states(net.size(), 0);
	for (std::size_t t = 0; t < total; ++t) {
		joint[t] = joint_eval(net, params, states);
		for (VarIndex v = net.size(); v-- > 0;) {
			if (++states[v] < net.cardinality(v))
				break;
			states[v] = 0;
		}
	}
	return joint;
}

}  // namespace bneb
