#pragma once

#include <cstdint>
#include <random>

namespace gridcast {

/// Seedable random stream with fixed output mappings. std::mt19937_64 is
/// bit-portable, but the standard distributions are implementation-defined,
/// so uniform/normal draws are derived here to keep artifacts byte-identical
/// across toolchains.
class Rng {
public:
	explicit Rng(std::uint64_t seed) : engine_(seed) {}

	std::uint64_t next_u64() { return engine_(); }

	/// Uniform in [0, 1), 53-bit resolution.
	double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

	double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

	/// Standard normal (Box-Muller; the second value of each pair is cached).
	double normal();

	/// Unbiased integer in [0, n). n must be positive.
	std::uint64_t below(std::uint64_t n);

private:
	std::mt19937_64 engine_;
	bool has_spare_ = false;
	double spare_ = 0.0;
};

} // namespace gridcast
