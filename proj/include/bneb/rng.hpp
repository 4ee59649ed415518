#ifndef BNEB_RNG_HPP
#define BNEB_RNG_HPP

#include <cstdint>
#include <initializer_list>
#include <random>

namespace bneb {

///
/// \brief Seeded random stream with portable variate generation.
///
/// The engine is std::mt19937_64, whose output sequence is fixed by the
/// standard. The variates below are computed here rather than through
/// <random> distributions, whose algorithms are implementation-defined, so a
/// seed reproduces the same draws on every platform.
///
/// Child streams are derived from a master seed and a path of integers
/// (e.g. {trial, replicate}); work split across threads stays bitwise
/// reproducible as long as every unit of work owns its derived stream.
///
class Rng {
public:
	explicit Rng(std::uint64_t seed);

	/// Independent stream for the given path under a master seed.
	static Rng derive(std::uint64_t master, std::initializer_list<std::uint64_t> path);

	std::uint64_t next_u64() { return engine_(); }

	/// Uniform on [0, 1) with 53 random bits.
	double uniform();
	/// Uniform on (0, 1).
	double uniform_open();
	/// Uniform integer in [0, n); n > 0. Unbiased by rejection.
	std::uint64_t below(std::uint64_t n);
	/// Standard normal (Marsaglia polar method).
	double normal();
	/// Gamma(shape, 1) by Marsaglia-Tsang; shape < 1 uses the U^{1/shape} boost.
	double gamma(double shape);

private:
	std::mt19937_64 engine_;
	double spare_ = 0.0;
	bool has_spare_ = false;
};

}  // namespace bneb

#endif  // BNEB_RNG_HPP
