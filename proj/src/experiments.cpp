#include "bneb/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <sstream>

#include "bneb/dirichlet.hpp"
#include "bneb/errorbars.hpp"
#include "bneb/inference.hpp"
#include "bneb/montecarlo.hpp"
#include "bneb/parallel.hpp"

namespace bneb {

ExperimentConfig diamond_defaults() {
	return ExperimentConfig{};
}

ExperimentConfig random_defaults() {
	ExperimentConfig c;
	c.structure = StructureSource::Random;
	c.sample_sizes = {100};
	c.networks = 10;
	c.queries = 10;
	return c;
}

ExperimentConfig file_defaults() {
	ExperimentConfig c;
	c.structure = StructureSource::File;
	c.sample_sizes = {50, 100, 150, 200};
	c.queries = 100;
	c.hypothesis_sizes = {1};
	c.evidence_sizes = {5};
	return c;
}

void validate_config(const ExperimentConfig& c) {
	if (c.sample_sizes.empty())
		throw ConfigError("at least one sample size is required");
	if (c.deltas.empty())
		throw ConfigError("at least one delta is required");
	for (double d : c.deltas)
		if (!(d > 0.0 && d < 1.0))
			throw ConfigError("delta values must lie in (0, 1)");
	if (c.replicates < 1 || c.trials < 1 || c.networks < 1 || c.queries < 1)
		throw ConfigError("trial, network, query and replicate counts must be at least 1");
	if (c.hypothesis_sizes.empty() || c.evidence_sizes.empty())
		throw ConfigError("hypothesis and evidence size lists must be nonempty");
	for (std::size_t h : c.hypothesis_sizes)
		if (h < 1)
			throw ConfigError("hypothesis sizes must be at least 1");
	if (c.structure == StructureSource::Random) {
		if (c.nodes < 1)
			throw ConfigError("random networks need at least one node");
		if (c.links > c.nodes * (c.nodes - 1) / 2)
			throw ConfigError("too many links for " + std::to_string(c.nodes) + " nodes");
		for (std::size_t h : c.hypothesis_sizes)
			for (std::size_t e : c.evidence_sizes)
				if (h + e > c.nodes)
					throw ConfigError("#H + #E exceeds the node count");
	}
	if (c.structure == StructureSource::File && c.network_file.empty())
		throw ConfigError("file experiments need a network file");
}

const ValidityCell& ResultGrid::at(std::span<const std::size_t> index) const {
	std::size_t flat = 0;
	for (std::size_t a = 0; a < axis_labels.size(); ++a)
		flat = flat * axis_labels[a].size() + index[a];
	return cells.at(flat);
}

std::size_t ResultGrid::cell_count() const {
	std::size_t n = 1;
	for (const auto& labels : axis_labels)
		n *= labels.size();
	return n;
}

namespace {

std::string delta_label(double delta) {
	std::ostringstream os;
	os << delta;
	return os.str();
}

std::string percent_label(double delta) {
	std::ostringstream os;
	os << delta * 100.0 << "%";
	return os.str();
}

// Accumulates |dhat - delta| terms per cell in a fixed order.
struct CellAccumulator {
	std::vector<double> abs_sum, signed_sum;
	std::vector<std::size_t> count;

	explicit CellAccumulator(std::size_t n) : abs_sum(n, 0.0), signed_sum(n, 0.0), count(n, 0) {}

	void add(std::size_t cell, double dhat, double delta) {
		abs_sum[cell] += std::abs(dhat - delta);
		signed_sum[cell] += dhat - delta;
		++count[cell];
	}

	void fill(ResultGrid& grid) const {
		grid.cells.resize(grid.cell_count());
		std::vector<std::size_t> index(grid.axis_labels.size(), 0);
		for (std::size_t c = 0; c < grid.cells.size(); ++c) {
			auto& cell = grid.cells[c];
			cell.levels.clear();
			for (std::size_t a = 0; a < index.size(); ++a)
				cell.levels.push_back(grid.axis_labels[a][index[a]]);
			cell.k = count[c];
			cell.score = count[c] ? 100.0 * abs_sum[c] / static_cast<double>(count[c]) : std::nan("");
			cell.signed_score = count[c] ? 100.0 * signed_sum[c] / static_cast<double>(count[c]) : std::nan("");
			for (std::size_t a = index.size(); a-- > 0;) {
				if (++index[a] < grid.axis_labels[a].size())
					break;
				index[a] = 0;
			}
		}
	}
};

// Delta-hat per (query, delta) for one posterior, or NaN for a skipped query.
struct TrialOutcome {
	std::vector<double> delta_hat;  // [query * nd + d]
	std::size_t skipped = 0;
	std::size_t zero_evidence = 0;
};

TrialOutcome evaluate_queries(const Network& net, const DirichletCPT& post, const std::vector<Query>& queries,
                              const ExperimentConfig& config, std::uint64_t replicate_seed) {
	const std::size_t nd = config.deltas.size();
	TrialOutcome out;
	out.delta_hat.assign(queries.size() * nd, std::nan(""));

	const EliminationOrder order = min_fill_order(net);
	const CptParams mu = post.mean(net);
	std::vector<std::optional<QueryEstimate>> estimates(queries.size());
	for (std::size_t j = 0; j < queries.size(); ++j) {
		try {
			estimates[j] = delta_variance(net, post, mu, query_sensitivity(net, mu, queries[j], order));
		} catch (const ZeroEvidenceProbability&) {
			++out.skipped;
		}
	}

	const auto samples = posterior_query_samples(net, post, queries, config.replicates, replicate_seed, 1);
	for (std::size_t j = 0; j < queries.size(); ++j) {
		out.zero_evidence += samples[j].zero_evidence;
		if (!estimates[j] || samples[j].values.empty())
			continue;
		for (std::size_t d = 0; d < nd; ++d)
			out.delta_hat[j * nd + d] =
				coverage_deviation(samples[j].values, estimates[j]->mean, estimates[j]->std_dev, config.deltas[d]);
	}
	return out;
}

std::vector<std::string> size_labels(const std::vector<std::size_t>& sizes) {
	std::vector<std::string> out;
	for (std::size_t s : sizes)
		out.push_back(std::to_string(s));
	return out;
}

std::vector<std::string> delta_labels(const std::vector<double>& deltas) {
	std::vector<std::string> out;
	for (double d : deltas)
		out.push_back(delta_label(d));
	return out;
}

}  // namespace

void write_csv(std::ostream& os, const ResultGrid& grid) {
	for (const auto& name : grid.axis_names)
		os << name << ',';
	os << "score,signed_score,k\n";
	os << std::setprecision(17);
	for (const auto& cell : grid.cells) {
		for (const auto& level : cell.levels)
			os << level << ',';
		os << cell.score << ',' << cell.signed_score << ',' << cell.k << '\n';
	}
}

void write_text_table(std::ostream& os, const ResultGrid& grid, bool signed_score) {
	const std::size_t axes = grid.axis_labels.size();
	const auto& deltas = grid.axis_labels.back();
	const auto value = [&](const ValidityCell& c) { return signed_score ? c.signed_score : c.score; };
	os << std::fixed << std::setprecision(2);

	if (axes == 2) {
		os << std::setw(8) << grid.axis_names[0];
		for (const auto& d : deltas)
			os << std::setw(9) << ("d=" + d);
		os << '\n';
		for (std::size_t i = 0; i < grid.axis_labels[0].size(); ++i) {
			os << std::setw(8) << grid.axis_labels[0][i];
			for (std::size_t d = 0; d < deltas.size(); ++d) {
				const std::size_t idx[] = {i, d};
				os << std::setw(9) << value(grid.at(idx));
			}
			os << '\n';
		}
		os.unsetf(std::ios::floatfield);
		return;
	}

	for (std::size_t d = 0; d < deltas.size(); ++d) {
		os << "delta = " << percent_label(std::stod(deltas[d])) << '\n';
		os << std::setw(8) << grid.axis_names[0];
		for (const auto& col : grid.axis_labels[1])
			os << std::setw(9) << col;
		os << '\n';
		for (std::size_t i = 0; i < grid.axis_labels[0].size(); ++i) {
			os << std::setw(8) << grid.axis_labels[0][i];
			for (std::size_t j = 0; j < grid.axis_labels[1].size(); ++j) {
				const std::size_t idx[] = {i, j, d};
				os << std::setw(9) << value(grid.at(idx));
			}
			os << '\n';
		}
	}
	os.unsetf(std::ios::floatfield);
}

Network diamond_network() {
	std::vector<VariableSpec> vars;
	for (const char* name : {"X1", "X2", "X3", "X4"})
		vars.push_back({name, {"0", "1"}});
	return build_network(vars, {{"X1", "X2"}, {"X1", "X3"}, {"X2", "X4"}, {"X3", "X4"}});
}

CptParams diamond_example_params() {
	const Network net = diamond_network();
	CptParams p(net, 0.0);
	p.tables[0] = {0.6, 0.4};
	p.tables[1] = {0.7, 0.3, 0.2, 0.8};
	p.tables[2] = {0.9, 0.1, 0.4, 0.6};
	p.tables[3] = {0.95, 0.05, 0.3, 0.7, 0.4, 0.6, 0.1, 0.9};
	return p;
}

std::vector<Query> diamond_queries() {
	// variable indices: X1 = 0, X2 = 1, X3 = 2, X4 = 3; state 1 is "1".
	auto assign = [](std::initializer_list<VarIndex> vars) {
		Assignment a;
		for (VarIndex v : vars)
			a.set(v, 1);
		return a;
	};
	return {
		make_query(assign({0}), {}),
		make_query(assign({0}), assign({1})),
		make_query(assign({0}), assign({1, 2})),
		make_query(assign({1, 2}), assign({0})),
		make_query(assign({0}), assign({3})),
		make_query(assign({3}), assign({0})),
	};
}

std::array<double, 6> diamond_closed_forms(const CptParams& p) {
	const auto t1 = [&](std::size_t a) { return p.tables[0][a]; };
	const auto t2 = [&](std::size_t b, std::size_t a) { return p.tables[1][a * 2 + b]; };
	const auto t3 = [&](std::size_t c, std::size_t a) { return p.tables[2][a * 2 + c]; };
	const auto t4 = [&](std::size_t d, std::size_t b, std::size_t c) { return p.tables[3][(b * 2 + c) * 2 + d]; };
	const auto ratio = [](double num, double den, const char* which) {
		if (den == 0.0)
			throw DivisionByZero(std::string(which) + " has a zero denominator");
		return num / den;
	};

	std::array<double, 6> q{};
	q[0] = t1(1);

	double den2 = 0.0, den3 = 0.0;
	for (std::size_t a = 0; a < 2; ++a) {
		den2 += t2(1, a) * t1(a);
		den3 += t2(1, a) * t3(1, a) * t1(a);
	}
	q[1] = ratio(t2(1, 1) * t1(1), den2, "Q2");
	q[2] = ratio(t2(1, 1) * t3(1, 1) * t1(1), den3, "Q3");
	q[3] = t2(1, 1) * t3(1, 1);

	double num5 = 0.0, den5 = 0.0, q6 = 0.0;
	for (std::size_t b = 0; b < 2; ++b)
		for (std::size_t c = 0; c < 2; ++c) {
			num5 += t4(1, b, c) * t2(b, 1) * t3(c, 1) * t1(1);
			q6 += t4(1, b, c) * t2(b, 1) * t3(c, 1);
			for (std::size_t a = 0; a < 2; ++a)
				den5 += t4(1, b, c) * t2(b, a) * t3(c, a) * t1(a);
		}
	q[4] = ratio(num5, den5, "Q5");
	q[5] = q6;
	return q;
}

Network random_dag(std::size_t n, std::size_t links, Rng& rng) {
	const std::size_t max_links = n * (n - 1) / 2;
	if (links > max_links)
		throw TooManyLinks(std::to_string(links) + " links requested, at most " + std::to_string(max_links) +
		                   " possible for " + std::to_string(n) + " nodes");

	std::vector<VarIndex> perm(n);
	for (std::size_t i = 0; i < n; ++i)
		perm[i] = i;
	for (std::size_t i = n; i > 1; --i)
		std::swap(perm[i - 1], perm[rng.below(i)]);

	// Forward pairs (i < j) in the random order, then a partial Fisher-Yates draw.
	std::vector<std::pair<std::size_t, std::size_t>> pairs;
	pairs.reserve(max_links);
	for (std::size_t i = 0; i < n; ++i)
		for (std::size_t j = i + 1; j < n; ++j)
			pairs.emplace_back(i, j);
	for (std::size_t k = 0; k < links; ++k)
		std::swap(pairs[k], pairs[k + rng.below(pairs.size() - k)]);
	std::vector<std::pair<std::size_t, std::size_t>> chosen(pairs.begin(), pairs.begin() + links);
	std::sort(chosen.begin(), chosen.end());

	std::vector<VariableSpec> vars;
	for (std::size_t i = 0; i < n; ++i)
		vars.push_back({"X" + std::to_string(i + 1), {"0", "1"}});
	std::vector<Arc> arcs;
	for (const auto& [i, j] : chosen)
		arcs.emplace_back(vars[perm[i]].name, vars[perm[j]].name);
	return build_network(std::move(vars), arcs);
}

Query random_query(const Network& net, std::size_t num_h, std::size_t num_e, Rng& rng) {
	const std::size_t n = net.size();
	if (num_h + num_e > n)
		throw TooManyVariables(std::to_string(num_h + num_e) + " variables requested from a network of " +
		                       std::to_string(n));
	std::vector<VarIndex> vars(n);
	for (std::size_t i = 0; i < n; ++i)
		vars[i] = i;
	for (std::size_t k = 0; k < num_h + num_e; ++k)
		std::swap(vars[k], vars[k + rng.below(n - k)]);
	Assignment h, e;
	for (std::size_t k = 0; k < num_h + num_e; ++k) {
		const VarIndex v = vars[k];
		(k < num_h ? h : e).set(v, rng.below(net.cardinality(v)));
	}
	return make_query(std::move(h), std::move(e));
}

ResultGrid run_diamond(const ExperimentConfig& config) {
	validate_config(config);
	const Network net = diamond_network();
	const auto queries = diamond_queries();
	const std::size_t nm = config.sample_sizes.size(), nq = queries.size(), nd = config.deltas.size();

	std::vector<TrialOutcome> outcomes(nm * config.trials);
	parallel_for(outcomes.size(), config.threads, [&](std::size_t job) {
		const std::size_t mi = job / config.trials, t = job % config.trials;
		Rng rng = Rng::derive(config.seed, {0, mi, t});
		const CptParams truth = sample_cpts(net, uniform_prior(net), rng);
		const Dataset data = forward_sample(net, truth, config.sample_sizes[mi], rng);
		const DirichletCPT post = posterior(net, uniform_prior(net), count_statistics(net, data));
		outcomes[job] = evaluate_queries(net, post, queries, config, rng.next_u64());
	});

	ResultGrid grid;
	grid.axis_names = {"m", "query", "delta"};
	grid.axis_labels = {size_labels(config.sample_sizes), {"Q1", "Q2", "Q3", "Q4", "Q5", "Q6"},
	                    delta_labels(config.deltas)};
	CellAccumulator acc(nm * nq * nd);
	for (std::size_t job = 0; job < outcomes.size(); ++job) {
		const std::size_t mi = job / config.trials;
		const auto& o = outcomes[job];
		grid.skipped_trials += o.skipped;
		grid.zero_evidence_replicates += o.zero_evidence;
		for (std::size_t j = 0; j < nq; ++j)
			for (std::size_t d = 0; d < nd; ++d)
				if (!std::isnan(o.delta_hat[j * nd + d]))
					acc.add((mi * nq + j) * nd + d, o.delta_hat[j * nd + d], config.deltas[d]);
	}
	acc.fill(grid);
	return grid;
}

ResultGrid run_random(const ExperimentConfig& config) {
	validate_config(config);
	const std::size_t nh = config.hypothesis_sizes.size(), ne = config.evidence_sizes.size(),
					  nd = config.deltas.size();
	const std::size_t per_net = nh * ne * config.queries;

	std::vector<TrialOutcome> outcomes(config.networks);
	parallel_for(config.networks, config.threads, [&](std::size_t k) {
		Rng rng = Rng::derive(config.seed, {1, k});
		const Network net = random_dag(config.nodes, config.links, rng);
		const CptParams truth = sample_cpts(net, uniform_prior(net), rng);
		const Dataset data = forward_sample(net, truth, config.sample_sizes.front(), rng);
		const DirichletCPT post = posterior(net, uniform_prior(net), count_statistics(net, data));

		std::vector<Query> queries;
		queries.reserve(per_net);
		for (std::size_t hi = 0; hi < nh; ++hi)
			for (std::size_t ei = 0; ei < ne; ++ei)
				for (std::size_t j = 0; j < config.queries; ++j) {
					Rng qrng = Rng::derive(config.seed, {2, k, hi, ei, j});
					queries.push_back(
						random_query(net, config.hypothesis_sizes[hi], config.evidence_sizes[ei], qrng));
				}
		outcomes[k] = evaluate_queries(net, post, queries, config, rng.next_u64());
	});

	ResultGrid grid;
	grid.axis_names = {"#H", "#E", "delta"};
	grid.axis_labels = {size_labels(config.hypothesis_sizes), size_labels(config.evidence_sizes),
	                    delta_labels(config.deltas)};
	CellAccumulator acc(nh * ne * nd);
	for (const auto& o : outcomes) {
		grid.skipped_trials += o.skipped;
		grid.zero_evidence_replicates += o.zero_evidence;
		for (std::size_t j = 0; j < per_net; ++j) {
			const std::size_t cell = j / config.queries;  // hi * ne + ei
			for (std::size_t d = 0; d < nd; ++d)
				if (!std::isnan(o.delta_hat[j * nd + d]))
					acc.add(cell * nd + d, o.delta_hat[j * nd + d], config.deltas[d]);
		}
	}
	acc.fill(grid);
	return grid;
}

ResultGrid run_file(const ExperimentConfig& config, const Network& net, const std::optional<CptParams>& truth_in) {
	validate_config(config);
	const std::size_t num_h = config.hypothesis_sizes.front(), num_e = config.evidence_sizes.front();
	if (num_h + num_e > net.size())
		throw ConfigError("#H + #E exceeds the node count");
	const std::size_t nm = config.sample_sizes.size(), nd = config.deltas.size();

	Rng truth_rng = Rng::derive(config.seed, {3});
	CptParams truth = truth_in ? *truth_in : sample_cpts(net, uniform_prior(net), truth_rng);
	validate_params(net, truth);

	std::vector<TrialOutcome> outcomes(nm);
	parallel_for(nm, config.threads, [&](std::size_t mi) {
		Rng rng = Rng::derive(config.seed, {4, mi});
		const Dataset data = forward_sample(net, truth, config.sample_sizes[mi], rng);
		const DirichletCPT post = posterior(net, uniform_prior(net), count_statistics(net, data));
		std::vector<Query> queries;
		for (std::size_t j = 0; j < config.queries; ++j)
			queries.push_back(random_query(net, num_h, num_e, rng));
		outcomes[mi] = evaluate_queries(net, post, queries, config, rng.next_u64());
	});

	ResultGrid grid;
	grid.axis_names = {"m", "delta"};
	grid.axis_labels = {size_labels(config.sample_sizes), delta_labels(config.deltas)};
	CellAccumulator acc(nm * nd);
	for (std::size_t mi = 0; mi < nm; ++mi) {
		const auto& o = outcomes[mi];
		grid.skipped_trials += o.skipped;
		grid.zero_evidence_replicates += o.zero_evidence;
		for (std::size_t j = 0; j < config.queries; ++j)
			for (std::size_t d = 0; d < nd; ++d)
				if (!std::isnan(o.delta_hat[j * nd + d]))
					acc.add(mi * nd + d, o.delta_hat[j * nd + d], config.deltas[d]);
	}
	acc.fill(grid);
	return grid;
}

}  // namespace bneb
