#ifndef BNEB_EXPERIMENTS_HPP
#define BNEB_EXPERIMENTS_HPP

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <ostream>
#include <string>
#include <vector>

#include "bneb/model.hpp"
#include "bneb/rng.hpp"

namespace bneb {

enum class StructureSource { Diamond, Random, File };

///
/// \brief Settings of one simulation study.
///
/// Which fields matter depends on the structure source:
///  - Diamond: sample_sizes, trials (per m), replicates, deltas.
///  - Random: nodes, links, sample_sizes[0], networks, queries (per network
///    and cell), hypothesis_sizes x evidence_sizes, replicates, deltas.
///  - File: network_file, sample_sizes, queries (per m),
///    hypothesis_sizes[0], evidence_sizes[0], replicates, deltas.
///
struct ExperimentConfig {
	StructureSource structure = StructureSource::Diamond;
	std::size_t nodes = 10;
	std::size_t links = 20;
	std::string network_file;
	std::vector<std::size_t> sample_sizes{10, 20, 30, 40};
	std::size_t trials = 30;
	std::size_t networks = 10;
	std::size_t queries = 10;
	std::size_t replicates = 100;
	std::vector<double> deltas{0.10, 0.20, 0.30, 0.40};
	std::vector<std::size_t> hypothesis_sizes{1, 2, 3, 4, 5};
	std::vector<std::size_t> evidence_sizes{1, 2, 3, 4, 5};
	std::uint64_t seed = 1;
	unsigned threads = 1;
};

/// Diamond study: four m values, 30 trials each.
ExperimentConfig diamond_defaults();
/// Random-network study: 10 binary nodes, 20 links, m = 100, 10 queries on 10 networks.
ExperimentConfig random_defaults();
/// Single-network study over a user file: m in {50, 100, 150, 200}, 100 queries, #H = 1, #E = 5.
ExperimentConfig file_defaults();

/// Throws ConfigError.
void validate_config(const ExperimentConfig& config);

struct ValidityCell {
	std::vector<std::string> levels;  // one label per axis
	double score = 0.0;               // 100 * mean |dhat - delta|
	double signed_score = 0.0;        // 100 * mean (dhat - delta)
	std::size_t k = 0;                // number of averaged terms
};

///
/// \brief Validity scores over a product of factor levels.
///
/// Cells are stored row-major over the axes; the last axis is always delta.
///
struct ResultGrid {
	std::vector<std::string> axis_names;
	std::vector<std::vector<std::string>> axis_labels;
	std::vector<ValidityCell> cells;
	std::size_t skipped_trials = 0;
	std::size_t zero_evidence_replicates = 0;

	const ValidityCell& at(std::span<const std::size_t> index) const;
	std::size_t cell_count() const;
};

void write_csv(std::ostream& os, const ResultGrid& grid);
/// One block per delta; rows are the first axis, columns the second.
void write_text_table(std::ostream& os, const ResultGrid& grid, bool signed_score = false);

/// X1 -> X2, X1 -> X3, X2 -> X4, X3 -> X4; binary states "0", "1".
Network diamond_network();

/// Illustrative diamond parameters with Theta_{1,1} = 0.4.
CptParams diamond_example_params();

/// Q1 = Pr{X1=1}; Q2 = Pr{X1=1|X2=1}; Q3 = Pr{X1=1|X2=1,X3=1};
/// Q4 = Pr{X2=1,X3=1|X1=1}; Q5 = Pr{X1=1|X4=1}; Q6 = Pr{X4=1|X1=1}.
std::vector<Query> diamond_queries();

/// Direct algebraic evaluation of Q1..Q6. Throws DivisionByZero.
std::array<double, 6> diamond_closed_forms(const CptParams& params);

/// Binary variables X1..Xn; random total order, then `links` distinct forward
/// pairs chosen uniformly. Throws TooManyLinks.
Network random_dag(std::size_t n, std::size_t links, Rng& rng);

/// num_h + num_e distinct variables with uniform states; the first num_h form
/// the hypothesis. Throws TooManyVariables.
Query random_query(const Network& net, std::size_t num_h, std::size_t num_e, Rng& rng);

/// Axes (m, query, delta).
ResultGrid run_diamond(const ExperimentConfig& config);
/// Axes (#H, #E, delta).
ResultGrid run_random(const ExperimentConfig& config);
/// Axes (m, delta). Ground truth is `truth` when given, else a draw from the uniform prior.
ResultGrid run_file(const ExperimentConfig& config, const Network& net, const std::optional<CptParams>& truth);

}  // namespace bneb

#endif  // BNEB_EXPERIMENTS_HPP
