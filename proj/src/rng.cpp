#include "bneb/rng.hpp"

#include <cmath>
#include <vector>

namespace bneb {

Rng::Rng(std::uint64_t seed) {
	std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)};
	engine_.seed(seq);
}

Rng Rng::derive(std::uint64_t master, std::initializer_list<std::uint64_t> path) {
	std::vector<std::uint32_t> words;
	words.reserve(2 + 2 * path.size() + 1);
	words.push_back(static_cast<std::uint32_t>(master));
	words.push_back(static_cast<std::uint32_t>(master >> 32));
	for (std::uint64_t p : path) {
		words.push_back(static_cast<std::uint32_t>(p));
		words.push_back(static_cast<std::uint32_t>(p >> 32));
	}
	words.push_back(static_cast<std::uint32_t>(path.size()));
	std::seed_seq seq(words.begin(), words.end());
	Rng rng(0);
	rng.engine_.seed(seq);
	return rng;
}

double Rng::uniform() {
	return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
}

double Rng::uniform_open() {
	double u;
	do {
		u = uniform();
	} while (u == 0.0);
	return u;
}

std::uint64_t Rng::below(std::uint64_t n) {
	const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
	std::uint64_t x;
	do {
		x = engine_();
	} while (x >= limit);
	return x % n;
}

double Rng::normal() {
	if (has_spare_) {
		has_spare_ = false;
		return spare_;
	}
	double u, v, s;
	do {
		u = 2.0 * uniform() - 1.0;
		v = 2.0 * uniform() - 1.0;
		s = u * u + v * v;
	} while (s >= 1.0 || s == 0.0);
	const double scale = std::sqrt(-2.0 * std::log(s) / s);
	spare_ = v * scale;
	has_spare_ = true;
	return u * scale;
}

double Rng::gamma(double shape) {
	if (shape < 1.0) {
		const double g = gamma(shape + 1.0);
		return g * std::pow(uniform_open(), 1.0 / shape);
	}
	const double d = shape - 1.0 / 3.0;
	const double c = 1.0 / std::sqrt(9.0 * d);
	for (;;) {
		double x, v;
		do {
			x = normal();
			v = 1.0 + c * x;
		} while (v <= 0.0);
		v = v * v * v;
		const double u = uniform_open();
		const double x2 = x * x;
		if (u < 1.0 - 0.0331 * x2 * x2)
			return d * v;
		if (std::log(u) < 0.5 * x2 + d * (1.0 - v + std::log(v)))
			return d * v;
	}
}

}  // namespace bneb
