#include "bneb/dirichlet.hpp"

#include <numeric>

namespace bneb {

namespace {

void check_alpha(std::span<const double> alpha) {
	if (alpha.empty())
		throw NonPositiveAlpha("empty Dirichlet row");
	for (double a : alpha)
		if (!(a > 0.0))
			throw NonPositiveAlpha("pseudocount " + std::to_string(a) + " is not positive");
}

}  // namespace

double DirichletCPT::row_total(const Network& net, VarIndex v, std::size_t f) const {
	const auto row = alpha.row(net, v, f);
	return std::accumulate(row.begin(), row.end(), 0.0);
}

CptParams DirichletCPT::mean(const Network& net) const {
	CptParams mu(net, 0.0);
	for (VarIndex v = 0; v < net.size(); ++v)
		for (std::size_t f = 0; f < net.config_count(v); ++f) {
			const auto m = row_mean(alpha.row(net, v, f));
			std::copy(m.begin(), m.end(), mu.row(net, v, f).begin());
		}
	return mu;
}

DirichletCPT uniform_prior(const Network& net) {
	return DirichletCPT{FamilyTable<double>(net, 1.0)};
}

void validate_dirichlet(const Network& net, const DirichletCPT& prior) {
	if (!prior.alpha.matches(net))
		throw ShapeMismatch("pseudocount tables do not match the network");
	for (VarIndex v = 0; v < net.size(); ++v)
		for (double a : prior.alpha.tables[v])
			if (!(a > 0.0))
				throw NonPositiveAlpha(net.variable(v).name + " has pseudocount " + std::to_string(a));
}

CountTable count_statistics(const Network& net, const Dataset& data) {
	validate_dataset(net, data);
	CountTable out{FamilyTable<std::int64_t>(net, 0), static_cast<std::int64_t>(data.size())};
	for (const auto& rec : data.records)
		for (VarIndex v = 0; v < net.size(); ++v) {
			std::size_t f = 0;
			for (VarIndex p : net.parents(v))
				f = f * net.cardinality(p) + rec[p];
			++out.counts.tables[v][f * net.cardinality(v) + rec[v]];
		}
	return out;
}

DirichletCPT posterior(const Network& net, const DirichletCPT& prior, const CountTable& counts) {
	if (!prior.alpha.matches(net) || !counts.counts.matches(net))
		throw ShapeMismatch("prior or counts do not match the network");
	DirichletCPT out = prior;
	for (VarIndex v = 0; v < net.size(); ++v)
		for (std::size_t i = 0; i < out.alpha.tables[v].size(); ++i)
			out.alpha.tables[v][i] += static_cast<double>(counts.counts.tables[v][i]);
	return out;
}

std::vector<double> row_mean(std::span<const double> alpha) {
	check_alpha(alpha);
	const double total = std::accumulate(alpha.begin(), alpha.end(), 0.0);
	std::vector<double> mu(alpha.size());
	for (std::size_t x = 0; x < alpha.size(); ++x)
		mu[x] = alpha[x] / total;
	return mu;
}

std::vector<double> row_covariance(std::span<const double> alpha) {
	const auto mu = row_mean(alpha);
	const double total = std::accumulate(alpha.begin(), alpha.end(), 0.0);
	const std::size_t k = alpha.size();
	std::vector<double> cov(k * k);
	for (std::size_t x = 0; x < k; ++x)
		for (std::size_t y = 0; y < k; ++y)
			cov[x * k + y] = mu[x] * ((x == y ? 1.0 : 0.0) - mu[y]) / (total + 1.0);
	return cov;
}

std::vector<double> sample_row(std::span<const double> alpha, Rng& rng) {
	check_alpha(alpha);
	std::vector<double> draw(alpha.size());
	double total = 0.0;
	// Tiny pseudocounts can underflow every Gamma variate; redraw in that case.
	while (!(total > 0.0)) {
		total = 0.0;
		for (std::size_t x = 0; x < alpha.size(); ++x) {
			draw[x] = rng.gamma(alpha[x]);
			total += draw[x];
		}
	}
	for (double& d : draw)
		d /= total;
	return draw;
}

CptParams sample_cpts(const Network& net, const DirichletCPT& dist, Rng& rng) {
	if (!dist.alpha.matches(net))
		throw ShapeMismatch("pseudocount tables do not match the network");
	CptParams out(net, 0.0);
	for (VarIndex v = 0; v < net.size(); ++v)
		for (std::size_t f = 0; f < net.config_count(v); ++f) {
			const auto row = sample_row(dist.alpha.row(net, v, f), rng);
			std::copy(row.begin(), row.end(), out.row(net, v, f).begin());
		}
	return out;
}

}  // namespace bneb
