#include "bneb/montecarlo.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "bneb/errorbars.hpp"
#include "bneb/inference.hpp"
#include "bneb/parallel.hpp"
#include "bneb/rng.hpp"

namespace bneb {

std::vector<QuerySamples> posterior_query_samples(const Network& net, const DirichletCPT& post,
                                                  std::span<const Query> queries, std::size_t r,
                                                  std::uint64_t seed, unsigned threads) {
	if (r == 0)
		throw OutOfDomain("replicate count must be at least 1");
	validate_dirichlet(net, post);
	const EliminationOrder order = min_fill_order(net);

	std::vector<Assignment> joint_evidence;
	for (const auto& q : queries)
		joint_evidence.push_back(q.evidence.merged(q.hypothesis));

	// values[i * nq + j]; NaN marks a dropped replicate.
	const std::size_t nq = queries.size();
	std::vector<double> values(r * nq);
	parallel_for(r, threads, [&](std::size_t i) {
		Rng rng = Rng::derive(seed, {i});
		const CptParams theta = sample_cpts(net, post, rng);
		for (std::size_t j = 0; j < nq; ++j) {
			const double pe = prob_evidence(net, theta, queries[j].evidence, order);
			values[i * nq + j] =
				pe > 0.0 ? prob_evidence(net, theta, joint_evidence[j], order) / pe : std::nan("");
		}
	});

	std::vector<QuerySamples> out(nq);
	for (std::size_t j = 0; j < nq; ++j) {
		out[j].values.reserve(r);
		for (std::size_t i = 0; i < r; ++i) {
			const double v = values[i * nq + j];
			if (std::isnan(v))
				++out[j].zero_evidence;
			else
				out[j].values.push_back(v);
		}
	}
	return out;
}

QuerySamples posterior_query_samples(const Network& net, const DirichletCPT& post, const Query& q, std::size_t r,
                                     std::uint64_t seed, unsigned threads) {
	return std::move(posterior_query_samples(net, post, std::span(&q, 1), r, seed, threads).front());
}

double coverage_deviation(std::span<const double> samples, double mean, double sigma, double delta) {
	if (samples.empty())
		throw OutOfDomain("coverage needs at least one sample");
	const double half_width = two_sided_z(delta) * sigma;
	const auto outside =
		std::count_if(samples.begin(), samples.end(), [&](double q) { return std::abs(q - mean) > half_width; });
	return static_cast<double>(outside) / static_cast<double>(samples.size());
}

double validity(std::span<const double> deltas_hat, double delta, bool signed_score) {
	if (deltas_hat.empty())
		throw OutOfDomain("validity needs at least one estimate");
	double sum = 0.0;
	for (double d : deltas_hat)
		sum += signed_score ? d - delta : std::abs(d - delta);
	return 100.0 * sum / static_cast<double>(deltas_hat.size());
}

GoldStandard gold_standard(double delta, std::size_t r) {
	if (!(delta > 0.0 && delta < 1.0))
		throw OutOfDomain("delta must lie in (0, 1)");
	if (r == 0)
		throw OutOfDomain("r must be at least 1");
	const double n = static_cast<double>(r);
	const double log_p = std::log(delta), log_q = std::log1p(-delta);
	double m1 = 0.0, m2 = 0.0;
	for (std::size_t k = 0; k <= r; ++k) {
		const double kk = static_cast<double>(k);
		const double log_pmf =
			std::lgamma(n + 1.0) - std::lgamma(kk + 1.0) - std::lgamma(n - kk + 1.0) + kk * log_p + (n - kk) * log_q;
		const double pmf = std::exp(log_pmf);
		const double score = 100.0 * std::abs(kk / n - delta);
		m1 += pmf * score;
		m2 += pmf * score * score;
	}
	return {m1, std::sqrt(std::max(0.0, m2 - m1 * m1))};
}

QQResult qq_points(std::span<const double> samples) {
	const std::size_t r = samples.size();
	if (r < 2)
		throw DegenerateSample("QQ points need at least two samples");
	std::vector<double> sorted(samples.begin(), samples.end());
	std::sort(sorted.begin(), sorted.end());
	const double mean = std::accumulate(sorted.begin(), sorted.end(), 0.0) / static_cast<double>(r);
	double ss = 0.0;
	for (double x : sorted)
		ss += (x - mean) * (x - mean);
	const double sd = std::sqrt(ss / static_cast<double>(r - 1));
	if (!(sd > 0.0))
		throw DegenerateSample("samples have zero spread");

	QQResult out;
	out.points.reserve(r);
	for (std::size_t i = 0; i < r; ++i) {
		const double theoretical = normal_quantile((static_cast<double>(i) + 0.5) / static_cast<double>(r));
		out.points.emplace_back(theoretical, (sorted[i] - mean) / sd);
	}

	double mx = 0.0, my = 0.0;
	for (const auto& [x, y] : out.points) {
		mx += x;
		my += y;
	}
	mx /= static_cast<double>(r);
	my /= static_cast<double>(r);
	double sxy = 0.0, sxx = 0.0, syy = 0.0;
	for (const auto& [x, y] : out.points) {
		sxy += (x - mx) * (y - my);
		sxx += (x - mx) * (x - mx);
		syy += (y - my) * (y - my);
	}
	out.correlation = sxy / std::sqrt(sxx * syy);
	return out;
}

}  // namespace bneb
