#include "bneb/io.hpp"

#include <fstream>
#include <sstream>

#include "json.hpp"

namespace bneb {

using nlohmann::json;

namespace {

json parse_json(std::istream& is, const std::string& what) {
	try {
		return json::parse(is);
	} catch (const json::exception& e) {
		throw ParseError(what + ": " + e.what());
	}
}

std::ifstream open(const std::string& path) {
	std::ifstream is(path);
	if (!is)
		throw ParseError("cannot open " + path);
	return is;
}

// Fills one node's flat table from a row-per-configuration matrix.
template <class T>
void read_matrix(const Network& net, VarIndex v, const json& rows, std::vector<T>& out, const char* key) {
	const auto& name = net.variable(v).name;
	if (!rows.is_array() || rows.size() != net.config_count(v))
		throw ShapeMismatch(std::string(key) + " for " + name + " needs " + std::to_string(net.config_count(v)) +
		                    " rows");
	const std::size_t k = net.cardinality(v);
	out.assign(net.table_size(v), T{});
	for (std::size_t f = 0; f < rows.size(); ++f) {
		const auto& row = rows[f];
		if (!row.is_array() || row.size() != k)
			throw ShapeMismatch(std::string(key) + " row " + std::to_string(f) + " of " + name + " needs " +
			                    std::to_string(k) + " entries");
		for (std::size_t x = 0; x < k; ++x) {
			if (!row[x].is_number())
				throw ParseError(std::string(key) + " entries must be numbers");
			out[f * k + x] = row[x].get<T>();
		}
	}
}

std::vector<std::string> split(const std::string& text, char sep) {
	std::vector<std::string> parts;
	std::string cur;
	std::istringstream is(text);
	while (std::getline(is, cur, sep))
		parts.push_back(cur);
	if (!text.empty() && text.back() == sep)
		parts.emplace_back();
	return parts;
}

std::string trim(const std::string& s) {
	const auto b = s.find_first_not_of(" \t\r\n");
	if (b == std::string::npos)
		return "";
	const auto e = s.find_last_not_of(" \t\r\n");
	return s.substr(b, e - b + 1);
}

}  // namespace

NetworkFile parse_network(std::istream& is) {
	const json doc = parse_json(is, "network file");
	if (!doc.is_object() || !doc.contains("variables") || !doc["variables"].is_array())
		throw ParseError("network file needs a \"variables\" array");

	std::vector<VariableSpec> vars;
	for (const auto& jv : doc["variables"]) {
		if (!jv.is_object() || !jv.contains("name") || !jv["name"].is_string() || !jv.contains("states") ||
		    !jv["states"].is_array())
			throw ParseError("each variable needs a \"name\" string and a \"states\" array");
		VariableSpec spec{jv["name"].get<std::string>(), {}};
		for (const auto& s : jv["states"]) {
			if (!s.is_string())
				throw ParseError("state labels must be strings");
			spec.states.push_back(s.get<std::string>());
		}
		vars.push_back(std::move(spec));
	}

	std::vector<Arc> arcs;
	if (doc.contains("arcs")) {
		if (!doc["arcs"].is_array())
			throw ParseError("\"arcs\" must be an array");
		for (const auto& ja : doc["arcs"]) {
			if (!ja.is_array() || ja.size() != 2 || !ja[0].is_string() || !ja[1].is_string())
				throw ParseError("each arc must be a [parent, child] pair of names");
			arcs.emplace_back(ja[0].get<std::string>(), ja[1].get<std::string>());
		}
	}

	NetworkFile out{build_network(std::move(vars), arcs), std::nullopt};
	if (doc.contains("cpt")) {
		const auto& jc = doc["cpt"];
		if (!jc.is_object())
			throw ParseError("\"cpt\" must be an object keyed by variable name");
		CptParams params(out.network, 0.0);
		for (VarIndex v = 0; v < out.network.size(); ++v) {
			const auto& name = out.network.variable(v).name;
			if (!jc.contains(name))
				throw ShapeMismatch("\"cpt\" has no table for " + name);
			read_matrix(out.network, v, jc[name], params.tables[v], "cpt");
		}
		for (const auto& [name, _] : jc.items())
			out.network.index_of(name);
		validate_params(out.network, params);
		out.cpt = std::move(params);
	}
	return out;
}

NetworkFile parse_network_text(const std::string& text) {
	std::istringstream is(text);
	return parse_network(is);
}

NetworkFile load_network(const std::string& path) {
	auto is = open(path);
	return parse_network(is);
}

std::string network_to_json(const Network& net, const std::optional<CptParams>& cpt, int indent) {
	json doc;
	doc["variables"] = json::array();
	for (const auto& var : net.variables())
		doc["variables"].push_back({{"name", var.name}, {"states", var.states}});
	doc["arcs"] = json::array();
	for (const auto& [a, b] : net.arcs())
		doc["arcs"].push_back({net.variable(a).name, net.variable(b).name});
	if (cpt) {
		json jc = json::object();
		for (VarIndex v = 0; v < net.size(); ++v) {
			json rows = json::array();
			for (std::size_t f = 0; f < net.config_count(v); ++f) {
				const auto row = cpt->row(net, v, f);
				rows.push_back(std::vector<double>(row.begin(), row.end()));
			}
			jc[net.variable(v).name] = rows;
		}
		doc["cpt"] = jc;
	}
	return doc.dump(indent);
}

DirichletCPT parse_pseudocounts(const Network& net, std::istream& is) {
	const json doc = parse_json(is, "pseudocount file");
	if (!doc.is_object() || !doc.contains("pseudocounts") || !doc["pseudocounts"].is_object())
		throw ParseError("pseudocount file needs a \"pseudocounts\" object");
	DirichletCPT prior = uniform_prior(net);
	for (const auto& [name, rows] : doc["pseudocounts"].items()) {
		const VarIndex v = net.index_of(name);
		read_matrix(net, v, rows, prior.alpha.tables[v], "pseudocounts");
	}
	validate_dirichlet(net, prior);
	return prior;
}

DirichletCPT load_pseudocounts(const Network& net, const std::string& path) {
	auto is = open(path);
	return parse_pseudocounts(net, is);
}

Dataset parse_dataset(const Network& net, std::istream& is) {
	std::string line;
	if (!std::getline(is, line))
		throw ParseError("dataset is empty (a header row is required)");
	std::vector<VarIndex> columns;
	std::vector<bool> seen(net.size(), false);
	for (const auto& cell : split(line, ',')) {
		const VarIndex v = net.index_of(trim(cell));
		if (seen[v])
			throw ParseError("column " + net.variable(v).name + " appears twice");
		seen[v] = true;
		columns.push_back(v);
	}
	if (columns.size() != net.size())
		throw IncompleteRecord("dataset header must name every variable");

	Dataset data;
	std::size_t line_no = 1;
	while (std::getline(is, line)) {
		++line_no;
		if (trim(line).empty())
			continue;
		const auto cells = split(line, ',');
		if (cells.size() != columns.size())
			throw IncompleteRecord("line " + std::to_string(line_no) + " has " + std::to_string(cells.size()) +
			                       " fields, expected " + std::to_string(columns.size()));
		std::vector<StateIndex> rec(net.size());
		for (std::size_t c = 0; c < cells.size(); ++c)
			rec[columns[c]] = net.state_index(columns[c], trim(cells[c]));
		data.records.push_back(std::move(rec));
	}
	return data;
}

Dataset load_dataset(const Network& net, const std::string& path) {
	auto is = open(path);
	return parse_dataset(net, is);
}

void write_dataset(std::ostream& os, const Network& net, const Dataset& data) {
	for (VarIndex v = 0; v < net.size(); ++v)
		os << (v ? "," : "") << net.variable(v).name;
	os << '\n';
	for (const auto& rec : data.records) {
		for (VarIndex v = 0; v < net.size(); ++v)
			os << (v ? "," : "") << net.variable(v).states[rec[v]];
		os << '\n';
	}
}

Assignment parse_assignment(const Network& net, const std::string& text) {
	Assignment a;
	if (trim(text).empty())
		return a;
	for (const auto& part : split(text, ',')) {
		const auto eq = part.find('=');
		if (eq == std::string::npos)
			throw ParseError("expected Var=state, got '" + trim(part) + "'");
		const std::string name = trim(part.substr(0, eq));
		const VarIndex v = net.index_of(name);
		if (a.contains(v))
			throw ParseError(name + " is bound twice");
		a.set(v, net.state_index(v, trim(part.substr(eq + 1))));
	}
	return a;
}

std::string format_assignment(const Network& net, const Assignment& a) {
	std::string out;
	for (const auto& [v, s] : a) {
		if (!out.empty())
			out += ',';
		out += net.variable(v).name + "=" + net.variable(v).states[s];
	}
	return out;
}

std::vector<double> parse_delta_list(const std::string& text) {
	std::vector<double> out;
	for (const auto& part : split(text, ',')) {
		const std::string t = trim(part);
		std::size_t used = 0;
		double d = 0.0;
		try {
			d = std::stod(t, &used);
		} catch (const std::exception&) {
			throw ParseError("bad delta value '" + t + "'");
		}
		if (used != t.size())
			throw ParseError("bad delta value '" + t + "'");
		if (!(d > 0.0 && d < 1.0))
			throw OutOfDomain("delta " + t + " is outside (0, 1)");
		out.push_back(d);
	}
	if (out.empty())
		throw ParseError("empty delta list");
	return out;
}

ExperimentConfig parse_experiment_config(const std::string& text, ExperimentConfig c) {
	json doc;
	try {
		doc = json::parse(text);
	} catch (const json::exception& e) {
		throw ConfigError(std::string("config: ") + e.what());
	}
	if (!doc.is_object())
		throw ConfigError("config must be a JSON object");
	try {
		if (doc.contains("structure")) {
			const auto s = doc["structure"].get<std::string>();
			if (s == "diamond")
				c.structure = StructureSource::Diamond;
			else if (s == "random")
				c.structure = StructureSource::Random;
			else if (s == "file")
				c.structure = StructureSource::File;
			else
				throw ConfigError("unknown structure '" + s + "'");
		}
		if (doc.contains("nodes"))
			c.nodes = doc["nodes"].get<std::size_t>();
		if (doc.contains("links"))
			c.links = doc["links"].get<std::size_t>();
		if (doc.contains("network_file"))
			c.network_file = doc["network_file"].get<std::string>();
		if (doc.contains("sample_sizes"))
			c.sample_sizes = doc["sample_sizes"].get<std::vector<std::size_t>>();
		if (doc.contains("trials"))
			c.trials = doc["trials"].get<std::size_t>();
		if (doc.contains("networks"))
			c.networks = doc["networks"].get<std::size_t>();
		if (doc.contains("queries"))
			c.queries = doc["queries"].get<std::size_t>();
		if (doc.contains("replicates"))
			c.replicates = doc["replicates"].get<std::size_t>();
		if (doc.contains("deltas"))
			c.deltas = doc["deltas"].get<std::vector<double>>();
		if (doc.contains("hypothesis_sizes"))
			c.hypothesis_sizes = doc["hypothesis_sizes"].get<std::vector<std::size_t>>();
		if (doc.contains("evidence_sizes"))
			c.evidence_sizes = doc["evidence_sizes"].get<std::vector<std::size_t>>();
		if (doc.contains("seed"))
			c.seed = doc["seed"].get<std::uint64_t>();
		if (doc.contains("threads"))
			c.threads = doc["threads"].get<unsigned>();
	} catch (const json::exception& e) {
		throw ConfigError(std::string("config: ") + e.what());
	}
	validate_config(c);
	return c;
}

std::string experiment_config_to_json(const ExperimentConfig& c) {
	static const char* names[] = {"diamond", "random", "file"};
	json doc = {
		{"structure", names[static_cast<int>(c.structure)]},
		{"nodes", c.nodes},
		{"links", c.links},
		{"network_file", c.network_file},
		{"sample_sizes", c.sample_sizes},
		{"trials", c.trials},
		{"networks", c.networks},
		{"queries", c.queries},
		{"replicates", c.replicates},
		{"deltas", c.deltas},
		{"hypothesis_sizes", c.hypothesis_sizes},
		{"evidence_sizes", c.evidence_sizes},
		{"seed", c.seed},
	};
	return doc.dump();
}

std::uint64_t fnv1a(const std::string& text) {
	std::uint64_t h = 0xcbf29ce484222325ull;
	for (unsigned char ch : text) {
		h ^= ch;
		h *= 0x100000001b3ull;
	}
	return h;
}

}  // namespace bneb
