#include "bneb/model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>
#include <sstream>

namespace bneb {

std::optional<VarIndex> Network::find(const std::string& name) const {
	auto it = by_name_.find(name);
	if (it == by_name_.end())
		return std::nullopt;
	return it->second;
}

VarIndex Network::index_of(const std::string& name) const {
	auto v = find(name);
	if (!v)
		throw UnknownVariable("'" + name + "'");
	return *v;
}

StateIndex Network::state_index(VarIndex v, const std::string& label) const {
	const auto& states = variable(v).states;
	auto it = std::find(states.begin(), states.end(), label);
	if (it == states.end())
		throw UnknownState("'" + label + "' is not a state of " + variable(v).name);
	return static_cast<StateIndex>(it - states.begin());
}

bool Network::has_arc(VarIndex from, VarIndex to) const {
	const auto& pa = parents(to);
	return std::find(pa.begin(), pa.end(), from) != pa.end();
}

bool Network::is_complete() const {
	for (VarIndex a = 0; a < size(); ++a)
		for (VarIndex b = a + 1; b < size(); ++b)
			if (!has_arc(a, b) && !has_arc(b, a))
				return false;
	return true;
}

std::size_t Network::joint_size() const {
	std::size_t total = 1;
	for (const auto& var : variables_) {
		if (total > std::numeric_limits<std::size_t>::max() / var.states.size())
			return std::numeric_limits<std::size_t>::max();
		total *= var.states.size();
	}
	return total;
}

Network build_network(std::vector<VariableSpec> variables, const std::vector<Arc>& arcs) {
	Network net;
	const std::size_t n = variables.size();
	for (VarIndex v = 0; v < n; ++v) {
		const auto& var = variables[v];
		if (var.name.empty())
			throw ParseError("variable name must be nonempty");
		if (var.states.size() < 2)
			throw ParseError("variable " + var.name + " needs at least two states");
		std::set<std::string> labels(var.states.begin(), var.states.end());
		if (labels.size() != var.states.size())
			throw ParseError("duplicate state label in variable " + var.name);
		if (!net.by_name_.emplace(var.name, v).second)
			throw DuplicateVariable("'" + var.name + "'");
	}
	net.variables_ = std::move(variables);
	net.parents_.assign(n, {});
	net.children_.assign(n, {});

	for (const auto& [from, to] : arcs) {
		const VarIndex a = net.index_of(from);
		const VarIndex b = net.index_of(to);
		if (a == b)
			throw CycleError("self-loop on " + from);
		if (net.has_arc(a, b))
			continue;
		net.parents_[b].push_back(a);
		net.children_[a].push_back(b);
		net.arcs_.emplace_back(a, b);
	}

	// Kahn's algorithm; among ready nodes the earliest declared goes first.
	std::vector<std::size_t> indegree(n);
	for (VarIndex v = 0; v < n; ++v)
		indegree[v] = net.parents_[v].size();
	std::set<VarIndex> ready;
	for (VarIndex v = 0; v < n; ++v)
		if (indegree[v] == 0)
			ready.insert(v);
	while (!ready.empty()) {
		const VarIndex v = *ready.begin();
		ready.erase(ready.begin());
		net.topo_order_.push_back(v);
		for (VarIndex c : net.children_[v])
			if (--indegree[c] == 0)
				ready.insert(c);
	}
	if (net.topo_order_.size() != n) {
		std::string members;
		for (VarIndex v = 0; v < n; ++v)
			if (indegree[v] > 0)
				members += (members.empty() ? "" : ", ") + net.variables_[v].name;
		throw CycleError("arcs form a directed cycle among {" + members + "}");
	}

	net.config_count_.resize(n);
	for (VarIndex v = 0; v < n; ++v) {
		std::size_t count = 1;
		for (VarIndex p : net.parents_[v])
			count *= net.cardinality(p);
		net.config_count_[v] = count;
	}
	return net;
}

std::size_t family_config_index(const Network& net, VarIndex v, std::span<const StateIndex> parent_states) {
	const auto& pa = net.parents(v);
	if (parent_states.size() != pa.size())
		throw ArityMismatch(net.variable(v).name + " has " + std::to_string(pa.size()) + " parents, got " +
		                    std::to_string(parent_states.size()) + " states");
	std::size_t index = 0;
	for (std::size_t i = 0; i < pa.size(); ++i) {
		const std::size_t k = net.cardinality(pa[i]);
		if (parent_states[i] >= k)
			throw ArityMismatch("state " + std::to_string(parent_states[i]) + " out of range for " +
			                    net.variable(pa[i]).name);
		index = index * k + parent_states[i];
	}
	return index;
}

std::vector<StateIndex> family_config_states(const Network& net, VarIndex v, std::size_t index) {
	const auto& pa = net.parents(v);
	if (index >= net.config_count(v))
		throw ArityMismatch("configuration index out of range for " + net.variable(v).name);
	std::vector<StateIndex> states(pa.size());
	for (std::size_t i = pa.size(); i-- > 0;) {
		const std::size_t k = net.cardinality(pa[i]);
		states[i] = index % k;
		index /= k;
	}
	return states;
}

void Assignment::bind(const Network& net, const std::string& name, const std::string& label) {
	const VarIndex v = net.index_of(name);
	set(v, net.state_index(v, label));
}

std::optional<StateIndex> Assignment::get(VarIndex v) const {
	auto it = bindings_.find(v);
	if (it == bindings_.end())
		return std::nullopt;
	return it->second;
}

Assignment Assignment::merged(const Assignment& other) const {
	Assignment out = *this;
	for (const auto& [v, s] : other.bindings_)
		out.bindings_[v] = s;
	return out;
}

bool Assignment::disjoint(const Assignment& other) const {
	for (const auto& [v, s] : other.bindings_)
		if (contains(v))
			return false;
	return true;
}

bool Assignment::consistent_with(std::span<const StateIndex> full) const {
	for (const auto& [v, s] : bindings_)
		if (v >= full.size() || full[v] != s)
			return false;
	return true;
}

Query make_query(Assignment hypothesis, Assignment evidence) {
	if (hypothesis.empty())
		throw InvalidQuery("hypothesis must bind at least one variable");
	if (!hypothesis.disjoint(evidence))
		throw InvalidQuery("hypothesis and evidence bind a common variable");
	return Query{std::move(hypothesis), std::move(evidence)};
}

void validate_params(const Network& net, const CptParams& params) {
	if (params.tables.size() != net.size())
		throw ShapeMismatch("expected " + std::to_string(net.size()) + " CPTables, got " +
		                    std::to_string(params.tables.size()));
	for (VarIndex v = 0; v < net.size(); ++v) {
		const auto& name = net.variable(v).name;
		if (params.tables[v].size() != net.table_size(v))
			throw ShapeMismatch("CPTable of " + name + " has " + std::to_string(params.tables[v].size()) +
			                    " entries, expected " + std::to_string(net.table_size(v)));
		for (std::size_t f = 0; f < net.config_count(v); ++f) {
			double sum = 0.0;
			for (double p : params.row(net, v, f)) {
				if (!(p >= 0.0) || p > 1.0)
					throw NegativeEntry(name + " row " + std::to_string(f) + " has entry " + std::to_string(p) +
					                    " outside [0,1]");
				sum += p;
			}
			if (std::abs(sum - 1.0) > 1e-12) {
				std::ostringstream os;
				os.precision(17);
				os << name << " row " << f << " sums to " << sum;
				throw RowNotNormalized(os.str());
			}
		}
	}
}

double cpt_entry(const Network& net, const CptParams& params, VarIndex v, std::span<const StateIndex> full) {
	std::size_t f = 0;
	for (VarIndex p : net.parents(v))
		f = f * net.cardinality(p) + full[p];
	return params.tables[v][f * net.cardinality(v) + full[v]];
}

void validate_dataset(const Network& net, const Dataset& data) {
	for (std::size_t i = 0; i < data.records.size(); ++i) {
		const auto& rec = data.records[i];
		if (rec.size() != net.size())
			throw IncompleteRecord("record " + std::to_string(i) + " binds " + std::to_string(rec.size()) + " of " +
			                       std::to_string(net.size()) + " variables");
		for (VarIndex v = 0; v < net.size(); ++v)
			if (rec[v] >= net.cardinality(v))
				throw IncompleteRecord("record " + std::to_string(i) + " has invalid state for " +
				                       net.variable(v).name);
	}
}

std::vector<std::vector<VarIndex>> moral_graph(const Network& net) {
	std::vector<std::set<VarIndex>> adj(net.size());
	for (VarIndex v = 0; v < net.size(); ++v) {
		const auto& pa = net.parents(v);
		for (std::size_t i = 0; i < pa.size(); ++i) {
			adj[v].insert(pa[i]);
			adj[pa[i]].insert(v);
			for (std::size_t j = i + 1; j < pa.size(); ++j) {
				adj[pa[i]].insert(pa[j]);
				adj[pa[j]].insert(pa[i]);
			}
		}
	}
	std::vector<std::vector<VarIndex>> out(net.size());
	for (VarIndex v = 0; v < net.size(); ++v)
		out[v].assign(adj[v].begin(), adj[v].end());
	return out;
}

namespace {

std::size_t fill_in(const std::vector<std::set<VarIndex>>& adj, VarIndex v) {
	std::size_t fill = 0;
	for (auto a = adj[v].begin(); a != adj[v].end(); ++a)
		for (auto b = std::next(a); b != adj[v].end(); ++b)
			if (!adj[*a].count(*b))
				++fill;
	return fill;
}

// Connects v's neighbors pairwise, removes v and returns its degree at removal.
std::size_t eliminate(std::vector<std::set<VarIndex>>& adj, VarIndex v) {
	const std::vector<VarIndex> nbrs(adj[v].begin(), adj[v].end());
	for (std::size_t i = 0; i < nbrs.size(); ++i) {
		adj[nbrs[i]].erase(v);
		for (std::size_t j = i + 1; j < nbrs.size(); ++j) {
			adj[nbrs[i]].insert(nbrs[j]);
			adj[nbrs[j]].insert(nbrs[i]);
		}
	}
	adj[v].clear();
	return nbrs.size();
}

std::vector<std::set<VarIndex>> moral_sets(const Network& net) {
	const auto lists = moral_graph(net);
	std::vector<std::set<VarIndex>> adj(net.size());
	for (VarIndex v = 0; v < net.size(); ++v)
		adj[v].insert(lists[v].begin(), lists[v].end());
	return adj;
}

}  // namespace

EliminationOrder min_fill_order(const Network& net) {
	auto adj = moral_sets(net);
	std::vector<bool> done(net.size(), false);
	EliminationOrder result;
	result.order.reserve(net.size());
	for (std::size_t step = 0; step < net.size(); ++step) {
		VarIndex best = net.size();
		std::size_t best_fill = std::numeric_limits<std::size_t>::max();
		for (VarIndex v = 0; v < net.size(); ++v) {
			if (done[v])
				continue;
			const std::size_t fill = fill_in(adj, v);
			if (fill < best_fill) {
				best = v;
				best_fill = fill;
			}
		}
		done[best] = true;
		result.order.push_back(best);
		result.induced_width = std::max(result.induced_width, eliminate(adj, best));
	}
	return result;
}

std::size_t induced_width(const Network& net, std::span<const VarIndex> order) {
	auto adj = moral_sets(net);
	std::size_t width = 0;
	for (VarIndex v : order)
		width = std::max(width, eliminate(adj, v));
	return width;
}

}  // namespace bneb
