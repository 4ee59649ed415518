#include "cli.hpp"

#include <chrono>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <sstream>

#include "CLI11.hpp"
#include "bneb/dirichlet.hpp"
#include "bneb/errorbars.hpp"
#include "bneb/experiments.hpp"
#include "bneb/inference.hpp"
#include "bneb/io.hpp"
#include "bneb/montecarlo.hpp"
#include "json.hpp"

namespace bneb::cli {

namespace {

using nlohmann::json;

constexpr const char* kVersion = "0.1.0";
constexpr const char* kDefaultDeltas = "0.1,0.2,0.3,0.4";

struct QueryOptions {
	std::string network;
	std::string data;
	std::string prior;
	std::string target;
	std::string evidence;
	std::string deltas = kDefaultDeltas;
	std::string format = "text";
};

struct ValidateOptions {
	std::size_t replicates = 100;
	std::optional<std::uint64_t> seed;
	unsigned threads = 1;
	std::string qq_out;
};

struct SimulateOptions {
	std::string network;
	std::size_t m = 0;
	std::optional<std::uint64_t> seed;
	std::string out;
};

struct ExperimentOptions {
	std::string kind;
	std::string config;
	std::string out;
	std::string network;
	std::optional<std::uint64_t> seed;
	std::optional<unsigned> threads;
};

struct GoldOptions {
	std::string deltas = kDefaultDeltas;
	std::size_t r = 100;
	std::string format = "text";
};

std::uint64_t resolve_seed(const std::optional<std::uint64_t>& flag, std::uint64_t fallback = 1) {
	if (flag)
		return *flag;
	if (const char* env = std::getenv("BNEB_SEED")) {
		try {
			std::size_t used = 0;
			const auto s = std::stoull(env, &used);
			if (used == std::string(env).size())
				return s;
		} catch (const std::exception&) {
		}
		throw ParseError(std::string("BNEB_SEED is not an unsigned integer: '") + env + "'");
	}
	return fallback;
}

std::string sig6(double x) {
	std::ostringstream os;
	os << std::setprecision(6) << x;
	return os.str();
}

// Loaded model state shared by query and validate.
struct Problem {
	NetworkFile file;
	DirichletCPT prior;
	DirichletCPT post;
	std::int64_t m = 0;
	Query query;
	std::vector<double> deltas;
};

Problem load_problem(const QueryOptions& o) {
	Problem p;
	p.file = load_network(o.network);
	const Network& net = p.file.network;
	p.prior = o.prior.empty() ? uniform_prior(net) : load_pseudocounts(net, o.prior);
	CountTable counts{FamilyTable<std::int64_t>(net, 0), 0};
	if (!o.data.empty())
		counts = count_statistics(net, load_dataset(net, o.data));
	p.m = counts.records;
	p.post = posterior(net, p.prior, counts);
	p.query = make_query(parse_assignment(net, o.target), parse_assignment(net, o.evidence));
	p.deltas = parse_delta_list(o.deltas);
	return p;
}

std::string query_text(const Network& net, const Query& q) {
	std::string s = "Pr{" + format_assignment(net, q.hypothesis);
	if (!q.evidence.empty())
		s += " | " + format_assignment(net, q.evidence);
	return s + "}";
}

std::string config_text(const Network& net, VarIndex v, std::size_t f) {
	const auto& pa = net.parents(v);
	if (pa.empty())
		return "<>";
	const auto states = family_config_states(net, v, f);
	std::string s;
	for (std::size_t i = 0; i < pa.size(); ++i)
		s += (i ? "," : "") + net.variable(pa[i]).name + "=" + net.variable(pa[i]).states[states[i]];
	return s;
}

json estimate_json(const Problem& p, const QueryEstimate& est) {
	const Network& net = p.file.network;
	json j;
	j["query"] = {{"target", format_assignment(net, p.query.hypothesis)},
	              {"evidence", format_assignment(net, p.query.evidence)}};
	j["m"] = p.m;
	j["mean"] = est.mean;
	j["variance"] = est.variance;
	j["std"] = est.std_dev;
	j["clamped_rows"] = est.clamped_rows;
	j["intervals"] = json::array();
	for (const auto& ci : est.intervals)
		j["intervals"].push_back({{"delta", ci.delta},
		                          {"z", ci.z},
		                          {"lower", ci.raw.lower},
		                          {"upper", ci.raw.upper},
		                          {"clamped_lower", ci.clamped.lower},
		                          {"clamped_upper", ci.clamped.upper}});
	j["contributions"] = json::array();
	for (const auto& c : est.contributions)
		j["contributions"].push_back({{"node", net.variable(c.node).name},
		                              {"config", c.config},
		                              {"parents", config_text(net, c.node, c.config)},
		                              {"A", c.a},
		                              {"B", c.b},
		                              {"contribution", c.value}});
	return j;
}

void print_estimate(std::ostream& out, const Problem& p, const QueryEstimate& est, const std::string& format) {
	const Network& net = p.file.network;
	if (format == "json") {
		out << estimate_json(p, est).dump(2) << '\n';
		return;
	}
	if (format == "csv") {
		out << "delta,z,mean,std,lower,upper,clamped_lower,clamped_upper\n" << std::setprecision(17);
		for (const auto& ci : est.intervals)
			out << ci.delta << ',' << ci.z << ',' << est.mean << ',' << est.std_dev << ',' << ci.raw.lower << ','
			    << ci.raw.upper << ',' << ci.clamped.lower << ',' << ci.clamped.upper << '\n';
		return;
	}
	out << "query      " << query_text(net, p.query) << '\n';
	out << "records    " << p.m << '\n';
	out << "mean       " << sig6(est.mean) << '\n';
	out << "std        " << sig6(est.std_dev) << '\n';
	out << "variance   " << sig6(est.variance) << '\n';
	out << '\n' << std::left << std::setw(8) << "delta" << std::setw(12) << "z" << std::setw(14) << "lower"
	    << std::setw(14) << "upper" << std::setw(14) << "clamped_lo" << "clamped_hi" << '\n';
	for (const auto& ci : est.intervals)
		out << std::setw(8) << sig6(ci.delta) << std::setw(12) << sig6(ci.z) << std::setw(14) << sig6(ci.raw.lower)
		    << std::setw(14) << sig6(ci.raw.upper) << std::setw(14) << sig6(ci.clamped.lower)
		    << sig6(ci.clamped.upper) << '\n';
	out << '\n' << std::setw(10) << "node" << std::setw(24) << "parents" << std::setw(14) << "A" << std::setw(14)
	    << "B" << "contribution" << '\n';
	for (const auto& c : est.contributions)
		out << std::setw(10) << net.variable(c.node).name << std::setw(24) << config_text(net, c.node, c.config)
		    << std::setw(14) << sig6(c.a) << std::setw(14) << sig6(c.b) << sig6(c.value) << '\n';
	out << std::right;
}

QueryEstimate estimate(const Problem& p) {
	QueryEstimate est = delta_variance(p.file.network, p.post, p.query);
	attach_intervals(est, p.deltas);
	return est;
}

int cmd_query(const QueryOptions& o, std::ostream& out) {
	const Problem p = load_problem(o);
	print_estimate(out, p, estimate(p), o.format);
	return kOk;
}

int cmd_validate(const QueryOptions& o, const ValidateOptions& v, std::ostream& out) {
	const Problem p = load_problem(o);
	const QueryEstimate est = estimate(p);
	const std::uint64_t seed = resolve_seed(v.seed);
	const QuerySamples samples =
		posterior_query_samples(p.file.network, p.post, p.query, v.replicates, seed, v.threads);

	std::vector<CoverageReport> reports;
	for (double delta : p.deltas)
		reports.push_back({0, delta, samples.values.size(),
		                   coverage_deviation(samples.values, est.mean, est.std_dev, delta), est.mean, est.std_dev,
		                   seed});
	std::optional<QQResult> qq;
	try {
		qq = qq_points(samples.values);
	} catch (const DegenerateSample&) {
	}

	if (!v.qq_out.empty()) {
		std::ofstream f(v.qq_out);
		if (!f)
			throw ParseError("cannot write " + v.qq_out);
		f << "normal_quantile,z_score\n" << std::setprecision(17);
		if (qq)
			for (const auto& [x, y] : qq->points)
				f << x << ',' << y << '\n';
	}

	if (o.format == "json") {
		json j = estimate_json(p, est);
		j["replicates"] = v.replicates;
		j["seed"] = seed;
		j["zero_evidence_replicates"] = samples.zero_evidence;
		j["coverage"] = json::array();
		for (const auto& r : reports)
			j["coverage"].push_back({{"delta", r.delta}, {"delta_hat", r.delta_hat}, {"r", r.r}});
		j["qq_correlation"] = qq ? json(qq->correlation) : json(nullptr);
		out << j.dump(2) << '\n';
		return kOk;
	}
	if (o.format == "csv") {
		out << "delta,delta_hat,r,mean,std,seed\n" << std::setprecision(17);
		for (const auto& r : reports)
			out << r.delta << ',' << r.delta_hat << ',' << r.r << ',' << r.mean << ',' << r.sigma << ',' << r.seed
			    << '\n';
		return kOk;
	}
	out << "query      " << query_text(p.file.network, p.query) << '\n';
	out << "mean       " << sig6(est.mean) << '\n';
	out << "std        " << sig6(est.std_dev) << '\n';
	out << "replicates " << samples.values.size() << " (seed " << seed << ", dropped " << samples.zero_evidence
	    << ")\n\n";
	out << std::left << std::setw(10) << "delta" << std::setw(12) << "delta_hat" << "|delta_hat-delta|" << '\n';
	for (const auto& r : reports)
		out << std::setw(10) << sig6(r.delta) << std::setw(12) << sig6(r.delta_hat)
		    << sig6(std::abs(r.delta_hat - r.delta)) << '\n';
	out << std::right << "\nqq_correlation " << (qq ? sig6(qq->correlation) : std::string("n/a")) << '\n';
	return kOk;
}

int cmd_simulate(const SimulateOptions& o, std::ostream& out) {
	const NetworkFile file = load_network(o.network);
	if (!file.cpt)
		throw ParseError("network file has no \"cpt\" key; cannot simulate");
	Rng rng(resolve_seed(o.seed));
	const Dataset data = forward_sample(file.network, *file.cpt, o.m, rng);
	if (o.out.empty()) {
		write_dataset(out, file.network, data);
	} else {
		std::ofstream f(o.out, std::ios::binary);
		if (!f)
			throw ParseError("cannot write " + o.out);
		write_dataset(f, file.network, data);
	}
	return kOk;
}

std::string utc_timestamp() {
	const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
	std::tm tm{};
	gmtime_r(&now, &tm);
	std::ostringstream os;
	os << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
	return os.str();
}

int cmd_experiment(const ExperimentOptions& o, std::ostream& out) {
	ExperimentConfig config;
	if (o.kind == "diamond")
		config = diamond_defaults();
	else if (o.kind == "random")
		config = random_defaults();
	else
		config = file_defaults();

	if (!o.config.empty()) {
		std::ifstream f(o.config);
		if (!f)
			throw ConfigError("cannot open " + o.config);
		std::stringstream buf;
		buf << f.rdbuf();
		config = parse_experiment_config(buf.str(), config);
	}
	if (o.kind == "diamond")
		config.structure = StructureSource::Diamond;
	else if (o.kind == "random")
		config.structure = StructureSource::Random;
	else
		config.structure = StructureSource::File;
	if (!o.network.empty())
		config.network_file = o.network;
	if (o.seed || o.config.empty())
		config.seed = resolve_seed(o.seed, config.seed);
	if (o.threads)
		config.threads = *o.threads;
	validate_config(config);

	ResultGrid grid;
	if (config.structure == StructureSource::Diamond) {
		grid = run_diamond(config);
	} else if (config.structure == StructureSource::Random) {
		grid = run_random(config);
	} else {
		const NetworkFile file = load_network(config.network_file);
		grid = run_file(config, file.network, file.cpt);
	}

	std::filesystem::create_directories(o.out);
	const std::filesystem::path dir(o.out);
	{
		std::ofstream f(dir / "results.csv", std::ios::binary);
		write_csv(f, grid);
	}
	{
		std::ofstream f(dir / "results.txt", std::ios::binary);
		f << "validity, average |dhat - delta| in percent\n";
		write_text_table(f, grid);
		f << "\nsigned bias, average (dhat - delta) in percent\n";
		write_text_table(f, grid, true);
	}
	const std::string canonical = experiment_config_to_json(config);
	{
		std::ostringstream hash;
		hash << std::hex << std::setw(16) << std::setfill('0') << fnv1a(canonical);
		json manifest = {
			{"command", "experiment " + o.kind},
			{"config", json::parse(canonical)},
			{"config_hash", hash.str()},
			{"seed", config.seed},
			{"version", kVersion},
			{"timestamp", utc_timestamp()},
			{"skipped_trials", grid.skipped_trials},
			{"zero_evidence_replicates", grid.zero_evidence_replicates},
		};
		std::ofstream f(dir / "manifest.json", std::ios::binary);
		f << manifest.dump(2) << '\n';
	}

	write_text_table(out, grid);
	out << "\nwrote " << (dir / "results.csv").string() << ", " << (dir / "results.txt").string() << ", "
	    << (dir / "manifest.json").string() << '\n';
	return kOk;
}

int cmd_gold_standard(const GoldOptions& o, std::ostream& out) {
	const auto deltas = parse_delta_list(o.deltas);
	if (o.r < 1)
		throw OutOfDomain("r must be at least 1");
	if (o.format == "csv") {
		out << "delta,mean,std\n" << std::setprecision(17);
		for (double d : deltas) {
			const auto g = gold_standard(d, o.r);
			out << d << ',' << g.mean << ',' << g.std_dev << '\n';
		}
		return kOk;
	}
	if (o.format == "json") {
		json rows = json::array();
		for (double d : deltas) {
			const auto g = gold_standard(d, o.r);
			rows.push_back({{"delta", d}, {"mean", g.mean}, {"std", g.std_dev}});
		}
		out << json{{"r", o.r}, {"rows", rows}}.dump(2) << '\n';
		return kOk;
	}
	out << std::left << std::setw(8) << "delta" << std::setw(10) << "mean" << "std" << '\n';
	for (double d : deltas) {
		const auto g = gold_standard(d, o.r);
		std::ostringstream pct;
		pct << d * 100.0 << '%';
		out << std::setw(8) << pct.str() << std::fixed << std::setprecision(2) << std::setw(10) << g.mean
		    << g.std_dev << '\n';
		out.unsetf(std::ios::floatfield);
	}
	out << std::right;
	return kOk;
}

void add_query_flags(CLI::App* cmd, QueryOptions& o) {
	cmd->add_option("--network", o.network, "Network file (JSON)")->required();
	cmd->add_option("--data", o.data, "Training data (CSV); omitted means m = 0");
	cmd->add_option("--prior", o.prior, "Pseudocount file (JSON); default uniform");
	cmd->add_option("--target", o.target, "Hypothesis, e.g. \"X1=1\"")->required();
	cmd->add_option("--evidence", o.evidence, "Evidence, e.g. \"X2=1,X3=0\"");
	cmd->add_option("--delta", o.deltas, "Comma-separated miss probabilities")->capture_default_str();
	cmd->add_option("--format", o.format, "Output format")
		->check(CLI::IsMember({"text", "json", "csv"}))
		->capture_default_str();
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
	CLI::App app{"Bayesian error-bars for belief-net queries"};
	app.require_subcommand(1);
	app.set_version_flag("--version", kVersion);

	QueryOptions qo;
	auto* query = app.add_subcommand("query", "Posterior mean, delta-method std and credible intervals");
	add_query_flags(query, qo);

	QueryOptions vqo;
	ValidateOptions vo;
	auto* validate = app.add_subcommand("validate", "Monte Carlo coverage check of the credible intervals");
	add_query_flags(validate, vqo);
	validate->add_option("--replicates", vo.replicates, "Posterior replicates r")->capture_default_str();
	validate->add_option("--seed", vo.seed, "Master seed (fallback: BNEB_SEED, then 1)");
	validate->add_option("--threads", vo.threads, "Worker threads (0 = all cores)")->capture_default_str();
	validate->add_option("--qq-out", vo.qq_out, "Write QQ points to this CSV file");

	SimulateOptions so;
	auto* simulate = app.add_subcommand("simulate", "Forward-sample a dataset from a network with CPTs");
	simulate->add_option("--network", so.network, "Network file with a \"cpt\" key")->required();
	simulate->add_option("--m", so.m, "Number of records")->required();
	simulate->add_option("--seed", so.seed, "Seed (fallback: BNEB_SEED, then 1)");
	simulate->add_option("--out", so.out, "Output CSV (default stdout)");

	ExperimentOptions eo;
	auto* experiment = app.add_subcommand("experiment", "Run a coverage-validity study");
	experiment->add_option("kind", eo.kind, "diamond | random | file")
		->required()
		->check(CLI::IsMember({"diamond", "random", "file"}));
	experiment->add_option("--config", eo.config, "Experiment config (JSON)");
	experiment->add_option("--out", eo.out, "Output directory")->required();
	experiment->add_option("--network", eo.network, "Network file for kind = file");
	experiment->add_option("--seed", eo.seed, "Master seed (overrides the config)");
	experiment->add_option("--threads", eo.threads, "Worker threads (0 = all cores)");

	GoldOptions go;
	auto* gold = app.add_subcommand("gold-standard", "Exact validity floor under perfect calibration");
	gold->add_option("--delta", go.deltas, "Comma-separated miss probabilities")->capture_default_str();
	gold->add_option("--replicates,-r", go.r, "Replicates per estimate")->capture_default_str();
	gold->add_option("--format", go.format, "Output format")
		->check(CLI::IsMember({"text", "json", "csv"}))
		->capture_default_str();

	try {
		app.parse(argc, argv);
	} catch (const CLI::ParseError& e) {
		const int code = app.exit(e, out, err);
		return code == 0 ? kOk : kUsage;
	}

	try {
		if (*query)
			return cmd_query(qo, out);
		if (*validate)
			return cmd_validate(vqo, vo, out);
		if (*simulate)
			return cmd_simulate(so, out);
		if (*experiment)
			return cmd_experiment(eo, out);
		if (*gold)
			return cmd_gold_standard(go, out);
	} catch (const Error& e) {
		err << "error: " << e.what() << '\n';
		switch (e.error_class()) {
		case ErrorClass::Usage:
			return kUsage;
		case ErrorClass::Validation:
			return kValidation;
		case ErrorClass::Numerical:
			return kNumerical;
		}
	} catch (const std::filesystem::filesystem_error& e) {
		err << "error: " << e.what() << '\n';
		return kValidation;
	}
	return kUsage;
}

}  // namespace bneb::cli
