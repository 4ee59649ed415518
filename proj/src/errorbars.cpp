#include "bneb/errorbars.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>

namespace bneb {

QueryEstimate delta_variance(const Network& net, const DirichletCPT& post, const CptParams& mu,
                             const QuerySensitivity& sens) {
	const double pe = sens.prob_e();
	if (!(pe > 0.0))
		throw ZeroEvidenceProbability("Pr{e} = 0 at the posterior mean");
	const double ph = sens.mean();

	QueryEstimate est;
	est.mean = ph;
	std::vector<double> r;
	for (VarIndex v = 0; v < net.size(); ++v) {
		const std::size_t k = net.cardinality(v);
		r.resize(k);
		for (std::size_t f = 0; f < net.config_count(v); ++f) {
			const std::size_t base = f * k;
			RowContribution row{v, f, 0.0, 0.0, 0.0};
			double r_sum = 0.0;
			for (std::size_t x = 0; x < k; ++x) {
				const double theta = mu.tables[v][base + x];
				if (!(theta > 0.0))
					throw ZeroParameter(net.variable(v).name + " has a zero posterior mean");
				const double p_hxf = sens.with_he.joint.tables[v][base + x] / pe;
				const double p_xf = sens.with_e.joint.tables[v][base + x] / pe;
				r[x] = p_hxf - ph * p_xf;
				r_sum += r[x];
				row.a += r[x] * r[x] / theta;
			}
			row.b = r_sum * r_sum;

			// sum_x mu_x (q'_x - qbar)^2 with q'_x = r_x / mu_x and qbar = sum_x r_x;
			// equal to A - B on a normalized row and never negative.
			double centered = 0.0;
			for (std::size_t x = 0; x < k; ++x) {
				const double theta = mu.tables[v][base + x];
				const double dev = r[x] / theta - r_sum;
				centered += theta * dev * dev;
			}

			const double raw = row.a - row.b;
			const double allowance =
				kNegativeContributionTolerance + 64.0 * std::numeric_limits<double>::epsilon() * row.a;
			if (raw < -allowance)
				throw NegativeContribution(net.variable(v).name + " row " + std::to_string(f) + ": A - B = " +
				                           std::to_string(raw));
			if (raw < 0.0)
				++est.clamped_rows;

			row.value = centered / (post.row_total(net, v, f) + 1.0);
			est.variance += row.value;
			est.contributions.push_back(row);
		}
	}
	est.std_dev = std::sqrt(est.variance);
	return est;
}

QueryEstimate delta_variance(const Network& net, const DirichletCPT& post, const Query& q,
                             const EliminationOrder& order) {
	validate_dirichlet(net, post);
	const CptParams mu = post.mean(net);
	return delta_variance(net, post, mu, query_sensitivity(net, mu, q, order));
}

QueryEstimate delta_variance(const Network& net, const DirichletCPT& post, const Query& q) {
	return delta_variance(net, post, q, min_fill_order(net));
}

FamilyTable<double> finite_difference_derivatives(const Network& net, const CptParams& params, const Query& q,
                                                  const EliminationOrder& order, double step) {
	const Assignment he = q.evidence.merged(q.hypothesis);
	CptParams work = params;
	auto eval = [&] {
		const double pe = prob_evidence(net, work, q.evidence, order);
		if (!(pe > 0.0))
			throw ZeroEvidenceProbability("Pr{e} = 0 under a finite-difference perturbation");
		return prob_evidence(net, work, he, order) / pe;
	};
	FamilyTable<double> d(net, 0.0);
	for (VarIndex v = 0; v < net.size(); ++v)
		for (std::size_t i = 0; i < work.tables[v].size(); ++i) {
			const double theta = work.tables[v][i];
			work.tables[v][i] = theta + step;
			const double up = eval();
			work.tables[v][i] = theta - step;
			const double down = eval();
			work.tables[v][i] = theta;
			d.tables[v][i] = (up - down) / (2.0 * step);
		}
	return d;
}

double delta_variance_oracle(const Network& net, const DirichletCPT& post, const Query& q,
                             const EliminationOrder& order) {
	validate_dirichlet(net, post);
	const CptParams mu = post.mean(net);
	const auto d = finite_difference_derivatives(net, mu, q, order);
	double var = 0.0;
	for (VarIndex v = 0; v < net.size(); ++v) {
		const std::size_t k = net.cardinality(v);
		for (std::size_t f = 0; f < net.config_count(v); ++f) {
			const auto cov = row_covariance(post.alpha.row(net, v, f));
			const auto g = d.row(net, v, f);
			for (std::size_t x = 0; x < k; ++x)
				for (std::size_t y = 0; y < k; ++y)
					var += g[x] * g[y] * cov[x * k + y];
		}
	}
	return var;
}

double delta_variance_oracle(const Network& net, const DirichletCPT& post, const Query& q) {
	return delta_variance_oracle(net, post, q, min_fill_order(net));
}

double normal_cdf(double x) {
	return 0.5 * std::erfc(-x / std::numbers::sqrt2);
}

double normal_quantile(double p) {
	if (!(p > 0.0 && p < 1.0))
		throw OutOfDomain("normal quantile needs 0 < p < 1, got " + std::to_string(p));
	if (p > 0.5)
		return -normal_quantile(1.0 - p);

	// Acklam's rational approximation (relative error 1.15e-9) on the lower half.
	static constexpr double a[] = {-3.969683028665376e+01, 2.209460984245205e+02, -2.759285104469687e+02,
	                               1.383577518672690e+02,  -3.066479806614716e+01, 2.506628277459239e+00};
	static constexpr double b[] = {-5.447609879822406e+01, 1.615858368580409e+02, -1.556989798598866e+02,
	                               6.680131188771972e+01, -1.328068155288572e+01};
	static constexpr double c[] = {-7.784894002430293e-03, -3.223964580411365e-01, -2.400758277161838e+00,
	                               -2.549732539343734e+00, 4.374664141464968e+00,  2.938163982698783e+00};
	static constexpr double d[] = {7.784695709041462e-03, 3.224671290700398e-01, 2.445134137142996e+00,
	                               3.754408661907416e+00};
	constexpr double p_low = 0.02425;

	double x;
	if (p < p_low) {
		const double q = std::sqrt(-2.0 * std::log(p));
		x = (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
		    ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
	} else {
		const double q = p - 0.5;
		const double r = q * q;
		x = (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
		    (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
	}

	// One Newton step on Phi(x) = p.
	const double density = std::exp(-0.5 * x * x) / std::sqrt(2.0 * std::numbers::pi);
	if (density > 0.0)
		x -= (normal_cdf(x) - p) / density;
	return x;
}

double two_sided_z(double delta) {
	if (!(delta > 0.0 && delta < 1.0))
		throw OutOfDomain("delta must lie in (0, 1), got " + std::to_string(delta));
	return normal_quantile(1.0 - delta / 2.0);
}

CredibleInterval credible_interval(double mean, double sigma, double delta) {
	if (!(sigma >= 0.0))
		throw OutOfDomain("standard deviation must be nonnegative");
	CredibleInterval ci;
	ci.delta = delta;
	ci.z = two_sided_z(delta);
	ci.raw = {mean - ci.z * sigma, mean + ci.z * sigma};
	ci.clamped = {std::clamp(ci.raw.lower, 0.0, 1.0), std::clamp(ci.raw.upper, 0.0, 1.0)};
	return ci;
}

void attach_intervals(QueryEstimate& est, std::span<const double> deltas) {
	for (double delta : deltas)
		est.intervals.push_back(credible_interval(est.mean, est.std_dev, delta));
}

BetaParams exact_beta_aggregation(const Network& net, std::span<const double> joint_alpha, const Query& q) {
	if (joint_alpha.size() != net.joint_size())
		throw ShapeMismatch("joint pseudocounts must cover every full assignment");
	BetaParams beta;
	for (std::size_t i = 0; i < joint_alpha.size(); ++i) {
		const auto states = joint_states(net, i);
		if (!q.evidence.consistent_with(states))
			continue;
		if (!(joint_alpha[i] > 0.0))
			throw NonPositiveAlpha("joint pseudocount " + std::to_string(i) + " is not positive");
		(q.hypothesis.consistent_with(states) ? beta.a : beta.b) += joint_alpha[i];
	}
	if (!(beta.a + beta.b > 0.0))
		throw EmptyEvidenceSupport("no joint cell is consistent with the evidence");
	return beta;
}

double exact_complete_graph_variance(const Network& net, std::span<const std::int64_t> joint_counts,
                                     std::int64_t m, const Query& q) {
	if (!net.is_complete())
		throw PreconditionViolation("structure is not complete");
	if (joint_counts.size() != net.joint_size())
		throw PreconditionViolation("joint counts must cover every full assignment");
	const std::int64_t total = std::accumulate(joint_counts.begin(), joint_counts.end(), std::int64_t{0});
	if (total != m)
		throw PreconditionViolation("joint counts sum to " + std::to_string(total) + ", expected m = " +
		                            std::to_string(m));

	double alpha_all = 0.0, alpha_e = 0.0, alpha_he = 0.0;
	for (std::size_t i = 0; i < joint_counts.size(); ++i) {
		const double alpha = 1.0 + static_cast<double>(joint_counts[i]);
		alpha_all += alpha;
		const auto states = joint_states(net, i);
		if (!q.evidence.consistent_with(states))
			continue;
		alpha_e += alpha;
		if (q.hypothesis.consistent_with(states))
			alpha_he += alpha;
	}
	const double p_e = alpha_e / alpha_all;
	const double p_h_given_e = alpha_he / alpha_e;
	return p_h_given_e * (1.0 - p_h_given_e) / (static_cast<double>(m) * p_e + 3.0);
}

std::vector<std::int64_t> joint_counts(const Network& net, const Dataset& data) {
	validate_dataset(net, data);
	if (net.joint_size() > kBruteForceLimit)
		throw StateSpaceTooLarge("joint state space exceeds 2^20 cells");
	std::vector<std::int64_t> counts(net.joint_size(), 0);
	for (const auto& rec : data.records) {
		std::size_t idx = 0;
		for (VarIndex v = 0; v < net.size(); ++v)
			idx = idx * net.cardinality(v) + rec[v];
		++counts[idx];
	}
	return counts;
}

}  // namespace bneb
