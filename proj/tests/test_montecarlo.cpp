#include <cmath>

#include "bneb/errorbars.hpp"
#include "bneb/errors.hpp"
#include "bneb/experiments.hpp"
#include "bneb/montecarlo.hpp"
#include "bneb/parallel.hpp"
#include "doctest.h"
#include "support.hpp"

using namespace bneb;

TEST_CASE("gold standard reproduces the tabulated floor") {
	const double deltas[] = {0.10, 0.20, 0.30, 0.40};
	const double means[] = {2.38, 3.15, 3.63, 3.88};
	const double stds[] = {1.86, 2.41, 2.79, 2.96};
	for (int i = 0; i < 4; ++i) {
		const GoldStandard g = gold_standard(deltas[i], 100);
		CHECK(std::abs(g.mean - means[i]) <= 0.05);
		CHECK(std::abs(g.std_dev - stds[i]) <= 0.05);
	}
}

TEST_CASE("gold standard with one replicate is a two-point law") {
	for (double delta : {0.1, 0.25, 0.4}) {
		// B = 1 w.p. delta gives |1 - delta|, B = 0 gives delta
		const double mean = 100.0 * (delta * (1.0 - delta) + (1.0 - delta) * delta);
		const double second = 1e4 * (delta * (1.0 - delta) * (1.0 - delta) + (1.0 - delta) * delta * delta);
		const GoldStandard g = gold_standard(delta, 1);
		CHECK(g.mean == doctest::Approx(mean).epsilon(1e-12));
		CHECK(g.std_dev == doctest::Approx(std::sqrt(second - mean * mean)).epsilon(1e-9));
	}
	CHECK_THROWS_AS(gold_standard(0.0, 100), OutOfDomain);
	CHECK_THROWS_AS(gold_standard(0.1, 0), OutOfDomain);
}

TEST_CASE("coverage counts strictly outside the interval") {
	const double z = two_sided_z(0.1);
	const std::vector<double> s{0.0, z, -z, z + 1e-9, 2.0 * z};
	CHECK(coverage_deviation(s, 0.0, 1.0, 0.1) == doctest::Approx(2.0 / 5.0));
}

TEST_CASE("coverage is invariant under affine maps of the samples") {
	Rng rng(1);
	std::vector<double> s(500);
	for (auto& x : s)
		x = rng.normal();
	for (double delta : {0.1, 0.2, 0.3, 0.4}) {
		const double base = coverage_deviation(s, 0.1, 0.9, delta);
		std::vector<double> t(s.size());
		for (std::size_t i = 0; i < s.size(); ++i)
			t[i] = 3.0 + 2.5 * s[i];
		CHECK(coverage_deviation(t, 3.0 + 2.5 * 0.1, 2.5 * 0.9, delta) == base);
	}
}

TEST_CASE("normal samples have coverage near nominal") {
	Rng rng(2);
	std::vector<double> s(40000);
	for (auto& x : s)
		x = rng.normal();
	for (double delta : {0.1, 0.2, 0.3, 0.4}) {
		const double hat = coverage_deviation(s, 0.0, 1.0, delta);
		CHECK(std::abs(hat - delta) < 3.0 * std::sqrt(delta * (1 - delta) / s.size()));
	}
}

TEST_CASE("validity averages absolute or signed deviations") {
	const std::vector<double> hats{0.08, 0.13};
	CHECK(validity(hats, 0.1) == doctest::Approx(2.5));
	CHECK(validity(hats, 0.1, true) == doctest::Approx(0.5));
	CHECK_THROWS_AS(validity({}, 0.1), OutOfDomain);
}

TEST_CASE("QQ points of exact normal quantiles lie on a line") {
	const std::size_t r = 50;
	std::vector<double> s(r);
	for (std::size_t i = 0; i < r; ++i)
		s[r - 1 - i] = 7.0 + 2.0 * normal_quantile((i + 0.5) / r);
	const QQResult qq = qq_points(s);
	CHECK(qq.points.size() == r);
	CHECK(qq.correlation == doctest::Approx(1.0).epsilon(1e-12));
	CHECK(qq.points.front().first < qq.points.back().first);

	CHECK_THROWS_AS(qq_points(std::vector<double>{1.0}), DegenerateSample);
	CHECK_THROWS_AS(qq_points(std::vector<double>{2.0, 2.0, 2.0}), DegenerateSample);
}

TEST_CASE("posterior samples depend on the seed, not the thread count") {
	const Network net = diamond_network();
	const DirichletCPT prior = uniform_prior(net);
	const auto queries = diamond_queries();
	const auto one = posterior_query_samples(net, prior, queries, 64, 99, 1);
	const auto four = posterior_query_samples(net, prior, queries, 64, 99, 4);
	const auto other = posterior_query_samples(net, prior, queries, 64, 100, 1);
	REQUIRE(one.size() == queries.size());
	for (std::size_t j = 0; j < queries.size(); ++j) {
		CHECK(one[j].values == four[j].values);
		CHECK(one[j].values.size() == 64);
	}
	CHECK(one[0].values != other[0].values);

	// the single-query overload sees the same stream
	CHECK(posterior_query_samples(net, prior, queries[3], 64, 99).values == one[3].values);
}

TEST_CASE("posterior samples of a root marginal follow its Beta law") {
	const Network net = diamond_network();
	DirichletCPT post = uniform_prior(net);
	post.alpha.tables[0] = {3.0, 5.0};
	const auto s = posterior_query_samples(net, post, diamond_queries()[0], 20000, 5, 2);
	double m1 = 0.0, m2 = 0.0;
	for (double x : s.values) {
		m1 += x;
		m2 += x * x;
	}
	m1 /= s.values.size();
	const double var = m2 / s.values.size() - m1 * m1;
	const double a = 5.0, b = 3.0;
	CHECK(std::abs(m1 - a / (a + b)) < 0.005);
	CHECK(std::abs(var - a * b / ((a + b) * (a + b) * (a + b + 1))) < 0.002);
}

TEST_CASE("parallel_for visits every index and propagates errors") {
	std::vector<int> hit(1000, 0);
	parallel_for(hit.size(), 4, [&](std::size_t i) { hit[i] += 1; });
	for (int h : hit)
		CHECK(h == 1);
	CHECK_THROWS_AS(parallel_for(10, 3,
	                             [](std::size_t i) {
		                             if (i == 7)
			                             throw OutOfDomain("seven");
	                             }),
	                OutOfDomain);
}
