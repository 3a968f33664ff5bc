#include "gridcast/random.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace gridcast {

double Rng::normal() {
	if (has_spare_) {
		has_spare_ = false;
		return spare_;
	}
	double u1 = 0.0;
	do {
		u1 = uniform();
	} while (u1 <= 0.0);
	const double u2 = uniform();
	const double radius = std::sqrt(-2.0 * std::log(u1));
	const double angle = 2.0 * std::numbers::pi * u2;
	spare_ = radius * std::sin(angle);
	has_spare_ = true;
	return radius * std::cos(angle);
}

std::uint64_t Rng::below(std::uint64_t n) {
	if (n == 0) {
		throw std::invalid_argument("Rng::below: n must be positive");
	}
	const std::uint64_t max = std::numeric_limits<std::uint64_t>::max();
	const std::uint64_t limit = max - max % n;
	std::uint64_t x = 0;
	do {
		x = engine_();
	} while (x >= limit);
	return x % n;
}

} // namespace gridcast
