#include <cmath>
#include <numeric>

#include "bneb/dirichlet.hpp"
#include "bneb/errors.hpp"
#include "bneb/experiments.hpp"
#include "bneb/rng.hpp"
#include "doctest.h"
#include "support.hpp"

using namespace bneb;

TEST_CASE("rng streams are reproducible and distinct") {
	Rng a(42), b(42);
	for (int i = 0; i < 100; ++i)
		CHECK(a.next_u64() == b.next_u64());

	Rng c = Rng::derive(42, {1, 2});
	Rng d = Rng::derive(42, {1, 2});
	Rng e = Rng::derive(42, {2, 1});
	const auto x = c.next_u64();
	CHECK(x == d.next_u64());
	CHECK(x != e.next_u64());
}

TEST_CASE("uniform and below stay in range") {
	Rng rng(3);
	for (int i = 0; i < 10000; ++i) {
		const double u = rng.uniform();
		CHECK((u >= 0.0 && u < 1.0));
		const double v = rng.uniform_open();
		CHECK((v > 0.0 && v < 1.0));
		CHECK(rng.below(7) < 7u);
	}
}

TEST_CASE("normal and gamma moments") {
	Rng rng(5);
	const int n = 200000;
	double s1 = 0.0, s2 = 0.0;
	for (int i = 0; i < n; ++i) {
		const double z = rng.normal();
		s1 += z;
		s2 += z * z;
	}
	CHECK(std::abs(s1 / n) < 0.015);
	CHECK(std::abs(s2 / n - 1.0) < 0.02);

	for (double shape : {0.3, 1.0, 4.5}) {
		double g1 = 0.0, g2 = 0.0;
		for (int i = 0; i < n; ++i) {
			const double g = rng.gamma(shape);
			CHECK(g >= 0.0);
			g1 += g;
			g2 += g * g;
		}
		const double mean = g1 / n;
		const double var = g2 / n - mean * mean;
		// Gamma(k, 1): mean k, variance k
		CHECK(std::abs(mean - shape) < 5.0 * std::sqrt(shape / n));
		CHECK(std::abs(var - shape) / shape < 0.05);
	}
}

TEST_CASE("posterior adds counts to pseudocounts") {
	const Network net = diamond_network();
	Dataset data;
	data.records = {{1, 1, 0, 1}, {1, 0, 0, 0}, {0, 0, 0, 0}};
	const CountTable counts = count_statistics(net, data);
	CHECK(counts.records == 3);
	CHECK(counts.counts.tables[0] == std::vector<std::int64_t>{1, 2});
	// X2 given X1 = 1: one record each
	CHECK(counts.counts.tables[1][2] == 1);
	CHECK(counts.counts.tables[1][3] == 1);

	const DirichletCPT post = posterior(net, uniform_prior(net), counts);
	CHECK(post.alpha.tables[0] == std::vector<double>{2.0, 3.0});
	CHECK(post.row_total(net, 0, 0) == 5.0);
	const CptParams mu = post.mean(net);
	CHECK(mu.tables[0][1] == doctest::Approx(0.6));
	CHECK_NOTHROW(validate_params(net, mu));
}

TEST_CASE("row moments match the Beta closed form in two dimensions") {
	const std::vector<double> alpha{2.5, 4.0};
	const double a = alpha[0], b = alpha[1];
	const auto mean = row_mean(alpha);
	CHECK(mean[0] == doctest::Approx(a / (a + b)));
	const auto cov = row_covariance(alpha);
	const double beta_var = a * b / ((a + b) * (a + b) * (a + b + 1.0));
	CHECK(cov[0] == doctest::Approx(beta_var).epsilon(1e-14));
	CHECK(cov[3] == doctest::Approx(beta_var).epsilon(1e-14));
	CHECK(cov[1] == doctest::Approx(-beta_var).epsilon(1e-14));
}

TEST_CASE("row covariance rows sum to zero") {
	const std::vector<double> alpha{0.7, 1.3, 2.0, 5.5};
	const auto cov = row_covariance(alpha);
	for (std::size_t i = 0; i < 4; ++i) {
		double s = 0.0;
		for (std::size_t j = 0; j < 4; ++j)
			s += cov[i * 4 + j];
		CHECK(std::abs(s) < 1e-15);
	}
}

TEST_CASE("sample_row matches mean and covariance empirically") {
	const std::vector<double> alpha{1.5, 3.0, 0.8};
	const auto mean = row_mean(alpha);
	const auto cov = row_covariance(alpha);
	Rng rng(9);
	const int n = 100000;
	std::vector<double> s1(3, 0.0), s2(9, 0.0);
	for (int i = 0; i < n; ++i) {
		const auto x = sample_row(alpha, rng);
		CHECK(std::accumulate(x.begin(), x.end(), 0.0) == doctest::Approx(1.0).epsilon(1e-12));
		for (std::size_t a = 0; a < 3; ++a) {
			s1[a] += x[a];
			for (std::size_t b = 0; b < 3; ++b)
				s2[a * 3 + b] += x[a] * x[b];
		}
	}
	for (std::size_t a = 0; a < 3; ++a) {
		CHECK(std::abs(s1[a] / n - mean[a]) < 0.005);
		for (std::size_t b = 0; b < 3; ++b) {
			const double emp = s2[a * 3 + b] / n - (s1[a] / n) * (s1[b] / n);
			CHECK(std::abs(emp - cov[a * 3 + b]) < 0.003);
		}
	}
}

TEST_CASE("sample_cpts yields valid parameters") {
	const Network net = diamond_network();
	Rng rng(4);
	for (int i = 0; i < 100; ++i)
		CHECK_NOTHROW(validate_params(net, sample_cpts(net, uniform_prior(net), rng)));
}

TEST_CASE("invalid pseudocounts are rejected") {
	const Network net = diamond_network();
	DirichletCPT d = uniform_prior(net);
	d.alpha.tables[2][1] = 0.0;
	CHECK_THROWS_AS(validate_dirichlet(net, d), NonPositiveAlpha);
	const std::vector<double> bad{1.0, -1.0};
	CHECK_THROWS_AS(row_mean(bad), NonPositiveAlpha);

	CountTable wrong{FamilyTable<std::int64_t>(net, 0), 0};
	wrong.counts.tables.pop_back();
	CHECK_THROWS_AS(posterior(net, uniform_prior(net), wrong), ShapeMismatch);
}
