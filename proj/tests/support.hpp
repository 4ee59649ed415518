#ifndef BNEB_TESTS_SUPPORT_HPP
#define BNEB_TESTS_SUPPORT_HPP

#include <cmath>
#include <string>
#include <vector>

#include "bneb/dirichlet.hpp"
#include "bneb/inference.hpp"
#include "bneb/model.hpp"
#include "bneb/rng.hpp"

namespace bneb::testing {

/// Random DAG over n variables with 2..max_card states each; each forward
/// pair becomes an arc with probability p_arc.
inline Network random_network(std::size_t n, std::size_t max_card, double p_arc, Rng& rng) {
	std::vector<VariableSpec> vars;
	for (std::size_t i = 0; i < n; ++i) {
		VariableSpec spec{"V" + std::to_string(i), {}};
		const std::size_t k = 2 + rng.below(max_card - 1);
		for (std::size_t s = 0; s < k; ++s)
			spec.states.push_back("s" + std::to_string(s));
		vars.push_back(spec);
	}
	std::vector<Arc> arcs;
	for (std::size_t j = 1; j < n; ++j)
		for (std::size_t i = 0; i < j; ++i)
			if (rng.uniform() < p_arc)
				arcs.push_back({vars[i].name, vars[j].name});
	return build_network(vars, arcs);
}

/// CPT rows drawn uniformly from the simplex.
inline CptParams random_params(const Network& net, Rng& rng) {
	return sample_cpts(net, uniform_prior(net), rng);
}

/// Random pseudocounts in (0.5, 5.5).
inline DirichletCPT random_dirichlet(const Network& net, Rng& rng) {
	DirichletCPT d{FamilyTable<double>(net, 0.0)};
	for (auto& t : d.alpha.tables)
		for (auto& a : t)
			a = 0.5 + 5.0 * rng.uniform();
	return d;
}

/// Random assignment of `count` distinct variables avoiding `avoid`.
inline Assignment random_assignment(const Network& net, std::size_t count, Rng& rng,
                                    const Assignment& avoid = {}) {
	Assignment a;
	while (a.size() < count) {
		const VarIndex v = rng.below(net.size());
		if (avoid.contains(v) || a.contains(v))
			continue;
		a.set(v, rng.below(net.cardinality(v)));
	}
	return a;
}

/// Pr{assignment} by summing the enumerated joint.
inline double brute_probability(const Network& net, const std::vector<double>& joint, const Assignment& a) {
	double p = 0.0;
	for (std::size_t i = 0; i < joint.size(); ++i)
		if (a.consistent_with(joint_states(net, i)))
			p += joint[i];
	return p;
}

/// Pr{assignment} from products of raw table entries; no normalization is
/// assumed, so this also evaluates the rational extension.
inline double enumerate_probability(const Network& net, const CptParams& params, const Assignment& a) {
	std::vector<StateIndex> full(net.size(), 0);
	double total = 0.0;
	for (;;) {
		if (a.consistent_with(full)) {
			double p = 1.0;
			for (VarIndex v = 0; v < net.size(); ++v) {
				std::vector<StateIndex> pa;
				for (VarIndex u : net.parents(v))
					pa.push_back(full[u]);
				p *= params.tables[v][family_config_index(net, v, pa) * net.cardinality(v) + full[v]];
			}
			total += p;
		}
		std::size_t i = 0;
		while (i < net.size() && ++full[i] == net.cardinality(i))
			full[i++] = 0;
		if (i == net.size())
			return total;
	}
}

inline double enumerate_query(const Network& net, const CptParams& params, const Query& q) {
	return enumerate_probability(net, params, q.hypothesis.merged(q.evidence)) /
	       enumerate_probability(net, params, q.evidence);
}

inline bool close_rel(double a, double b, double rel, double abs_floor = 0.0) {
	return std::abs(a - b) <= rel * std::max(std::abs(a), std::abs(b)) + abs_floor;
}

inline Assignment ones(std::initializer_list<VarIndex> vars) {
	Assignment a;
	for (VarIndex v : vars)
		a.set(v, 1);
	return a;
}

}  // namespace bneb::testing

#endif  // BNEB_TESTS_SUPPORT_HPP
