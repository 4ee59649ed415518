#ifndef BNEB_IO_HPP
#define BNEB_IO_HPP

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "bneb/dirichlet.hpp"
#include "bneb/experiments.hpp"
#include "bneb/model.hpp"

namespace bneb {

/// A network file: structure plus the optional `cpt` key.
struct NetworkFile {
	Network network;
	std::optional<CptParams> cpt;
};

///
/// Network files are JSON:
///   {"variables":[{"name":"X1","states":["0","1"]},...],
///    "arcs":[["X1","X2"],...],
///    "cpt":{"X2":[[0.5,0.5],[0.1,0.9]],...}}
/// with one `cpt` row per parent configuration in family_config_index order.
/// Throws ParseError and the build/validation errors of the model.
///
NetworkFile parse_network(std::istream& is);
NetworkFile parse_network_text(const std::string& text);
NetworkFile load_network(const std::string& path);

std::string network_to_json(const Network& net, const std::optional<CptParams>& cpt, int indent = -1);

/// {"pseudocounts": {"X1": [[1,1]], ...}}; nodes left out keep alpha* = 1.
DirichletCPT parse_pseudocounts(const Network& net, std::istream& is);
DirichletCPT load_pseudocounts(const Network& net, const std::string& path);

/// CSV, header = variable names (any order), rows = state labels.
Dataset parse_dataset(const Network& net, std::istream& is);
Dataset load_dataset(const Network& net, const std::string& path);
void write_dataset(std::ostream& os, const Network& net, const Dataset& data);

/// "Var=state,Var=state"; empty text gives an empty assignment.
Assignment parse_assignment(const Network& net, const std::string& text);
std::string format_assignment(const Network& net, const Assignment& a);

/// "0.1,0.2"; every value must lie in (0, 1).
std::vector<double> parse_delta_list(const std::string& text);

/// Experiment config JSON with the ExperimentConfig field names; missing keys keep `base`.
ExperimentConfig parse_experiment_config(const std::string& text, ExperimentConfig base);
std::string experiment_config_to_json(const ExperimentConfig& config);

/// 64-bit FNV-1a, used to fingerprint configs in run manifests.
std::uint64_t fnv1a(const std::string& text);

}  // namespace bneb

#endif  // BNEB_IO_HPP
