#ifndef BNEB_MODEL_HPP
#define BNEB_MODEL_HPP

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "bneb/errors.hpp"

namespace bneb {

using VarIndex = std::size_t;
using StateIndex = std::size_t;

struct VariableSpec {
	std::string name;
	std::vector<std::string> states;
};

using Arc = std::pair<std::string, std::string>;

///
/// \brief Validated DAG over finitely-valued variables.
///
/// Variables keep their declaration order; Pa(v) follows the order in which
/// the arcs into v were declared. Immutable once built.
///
class Network {
public:
	Network() = default;

	std::size_t size() const noexcept { return variables_.size(); }

	const VariableSpec& variable(VarIndex v) const { return variables_.at(v); }
	const std::vector<VariableSpec>& variables() const noexcept { return variables_; }
	std::size_t cardinality(VarIndex v) const { return variables_.at(v).states.size(); }

	const std::vector<VarIndex>& parents(VarIndex v) const { return parents_.at(v); }
	const std::vector<VarIndex>& children(VarIndex v) const { return children_.at(v); }
	const std::vector<VarIndex>& topo_order() const noexcept { return topo_order_; }
	const std::vector<std::pair<VarIndex, VarIndex>>& arcs() const noexcept { return arcs_; }

	/// |F_v|, the number of parent configurations of v.
	std::size_t config_count(VarIndex v) const { return config_count_.at(v); }
	/// |F_v| * |X_v|, the length of v's flattened CPTable.
	std::size_t table_size(VarIndex v) const { return config_count_.at(v) * cardinality(v); }

	std::optional<VarIndex> find(const std::string& name) const;
	VarIndex index_of(const std::string& name) const;  // throws UnknownVariable
	StateIndex state_index(VarIndex v, const std::string& label) const;  // throws UnknownState

	bool has_arc(VarIndex from, VarIndex to) const;
	/// Every pair of distinct nodes is joined by an arc.
	bool is_complete() const;

	/// Product of all cardinalities, saturating at SIZE_MAX.
	std::size_t joint_size() const;

	friend Network build_network(std::vector<VariableSpec> variables, const std::vector<Arc>& arcs);

private:
	std::vector<VariableSpec> variables_;
	std::unordered_map<std::string, VarIndex> by_name_;
	std::vector<std::vector<VarIndex>> parents_;
	std::vector<std::vector<VarIndex>> children_;
	std::vector<std::pair<VarIndex, VarIndex>> arcs_;
	std::vector<VarIndex> topo_order_;
	std::vector<std::size_t> config_count_;
};

/// Throws DuplicateVariable, UnknownVariable, CycleError, ParseError (bad domains).
Network build_network(std::vector<VariableSpec> variables, const std::vector<Arc>& arcs);

/// Mixed-radix index of a parent configuration; the first declared parent is
/// the most significant digit. Throws ArityMismatch.
std::size_t family_config_index(const Network& net, VarIndex v, std::span<const StateIndex> parent_states);

/// Inverse of family_config_index.
std::vector<StateIndex> family_config_states(const Network& net, VarIndex v, std::size_t index);

///
/// \brief Partial or full assignment of states to variables.
///
class Assignment {
public:
	Assignment() = default;

	void set(VarIndex v, StateIndex s) { bindings_[v] = s; }
	/// Binds by name and label; throws UnknownVariable / UnknownState.
	void bind(const Network& net, const std::string& name, const std::string& label);

	bool contains(VarIndex v) const { return bindings_.count(v) != 0; }
	std::optional<StateIndex> get(VarIndex v) const;
	bool empty() const noexcept { return bindings_.empty(); }
	std::size_t size() const noexcept { return bindings_.size(); }

	const std::map<VarIndex, StateIndex>& bindings() const noexcept { return bindings_; }
	auto begin() const { return bindings_.begin(); }
	auto end() const { return bindings_.end(); }

	/// Union of two assignments over disjoint variables.
	Assignment merged(const Assignment& other) const;
	bool disjoint(const Assignment& other) const;
	/// True when every bound variable agrees with the full state vector.
	bool consistent_with(std::span<const StateIndex> full) const;

	bool operator==(const Assignment&) const = default;

private:
	std::map<VarIndex, StateIndex> bindings_;
};

/// Q = Pr{H = h | E = e}.
struct Query {
	Assignment hypothesis;
	Assignment evidence;
};

/// Validates a nonempty hypothesis disjoint from the evidence; throws InvalidQuery.
Query make_query(Assignment hypothesis, Assignment evidence);

///
/// \brief Per-node tables indexed by (parent configuration, state).
///
/// Entry (f, x) of node v lives at tables[v][f * |X_v| + x].
///
template <class T>
struct FamilyTable {
	std::vector<std::vector<T>> tables;

	FamilyTable() = default;
	FamilyTable(const Network& net, T init) : tables(net.size()) {
		for (VarIndex v = 0; v < net.size(); ++v)
			tables[v].assign(net.table_size(v), init);
	}

	std::span<T> row(const Network& net, VarIndex v, std::size_t f) {
		const std::size_t k = net.cardinality(v);
		return std::span<T>(tables[v]).subspan(f * k, k);
	}
	std::span<const T> row(const Network& net, VarIndex v, std::size_t f) const {
		const std::size_t k = net.cardinality(v);
		return std::span<const T>(tables[v]).subspan(f * k, k);
	}

	bool matches(const Network& net) const {
		if (tables.size() != net.size())
			return false;
		for (VarIndex v = 0; v < net.size(); ++v)
			if (tables[v].size() != net.table_size(v))
				return false;
		return true;
	}
};

/// Concrete CPTable entries Theta_{v,x|f}.
using CptParams = FamilyTable<double>;

/// Throws ShapeMismatch, NegativeEntry, RowNotNormalized (tolerance 1e-12).
void validate_params(const Network& net, const CptParams& params);

/// The entry Theta_{v, x_v | f_v} selected by a full state vector.
double cpt_entry(const Network& net, const CptParams& params, VarIndex v, std::span<const StateIndex> full);

/// Complete records; each record is a state vector in variable order.
struct Dataset {
	std::vector<std::vector<StateIndex>> records;
	std::size_t size() const noexcept { return records.size(); }
};

/// Throws IncompleteRecord if any record is not a full, domain-valid assignment.
void validate_dataset(const Network& net, const Dataset& data);

struct EliminationOrder {
	std::vector<VarIndex> order;
	std::size_t induced_width = 0;
};

/// Undirected moral graph as sorted adjacency lists.
std::vector<std::vector<VarIndex>> moral_graph(const Network& net);

/// Greedy min-fill over the moral graph; ties go to the earliest declared variable.
EliminationOrder min_fill_order(const Network& net);

/// Induced width realized by eliminating the moral graph in the given order.
std::size_t induced_width(const Network& net, std::span<const VarIndex> order);

}  // namespace bneb

#endif  // BNEB_MODEL_HPP
