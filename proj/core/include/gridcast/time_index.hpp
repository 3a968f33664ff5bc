#pragma once

#include <cstddef>
#include <cstdint>
#include <string>

namespace gridcast {

/// Hours since the Unix epoch. The panel's native clock unit.
using EpochHour = std::int64_t;

/// Parses an ISO-8601 timestamp ("2023-04-30T23:00:00Z", space separator and
/// numeric offsets also accepted; no zone means UTC) and normalizes it to
/// UTC. Throws std::invalid_argument if the string is malformed or the
/// normalized instant does not fall on an exact hour.
EpochHour parse_hour_utc(const std::string& text);

/// Inverse of parse_hour_utc: "YYYY-MM-DDTHH:00:00Z".
std::string format_hour_utc(EpochHour hour);

/// Hour of day in [0, 24) for a UTC epoch hour.
int hour_of_day(EpochHour hour);

/// Gap-free hourly grid shared by every county in a panel.
struct TimeIndex {
	EpochHour start = 0;
	std::size_t length = 0;

	EpochHour at(std::size_t i) const { return start + static_cast<EpochHour>(i); }
	EpochHour last() const { return start + static_cast<EpochHour>(length) - 1; }

	/// Grid position of t, or -1 when t lies outside the index.
	std::ptrdiff_t index_of(EpochHour t) const {
		if (length == 0 || t < start || t > last()) return -1;
		return static_cast<std::ptrdiff_t>(t - start);
	}

	bool operator==(const TimeIndex&) const = default;
};

} // namespace gridcast
