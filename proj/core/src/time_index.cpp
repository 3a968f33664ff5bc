#include "gridcast/time_index.hpp"

#include <cctype>
#include <cstdio>
#include <stdexcept>

namespace gridcast {

namespace {

// Days from 1970-01-01 for a proleptic Gregorian civil date.
std::int64_t days_from_civil(std::int64_t y, unsigned m, unsigned d) {
	y -= m <= 2;
	const std::int64_t era = (y >= 0 ? y : y - 399) / 400;
	const auto yoe = static_cast<unsigned>(y - era * 400);
	const unsigned doy = (153 * (m + (m > 2 ? -3 : 9)) + 2) / 5 + d - 1;
	const unsigned doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
	return era * 146097 + static_cast<std::int64_t>(doe) - 719468;
}

void civil_from_days(std::int64_t z, std::int64_t& y, unsigned& m, unsigned& d) {
	z += 719468;
	const std::int64_t era = (z >= 0 ? z : z - 146096) / 146097;
	const auto doe = static_cast<unsigned>(z - era * 146097);
	const unsigned yoe = (doe - doe / 1460 + doe / 36524 - doe / 146096) / 365;
	const std::int64_t yy = static_cast<std::int64_t>(yoe) + era * 400;
	const unsigned doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
	const unsigned mp = (5 * doy + 2) / 153;
	d = doy - (153 * mp + 2) / 5 + 1;
	m = mp + (mp < 10 ? 3 : -9);
	y = yy + (m <= 2);
}

bool days_in_month_ok(std::int64_t y, unsigned m, unsigned d) {
	static const unsigned lengths[] = {31, 28, 31, 30, 31, 30, 31, 31, 30, 31, 30, 31};
	if (m < 1 || m > 12 || d < 1) return false;
	unsigned len = lengths[m - 1];
	const bool leap = (y % 4 == 0 && y % 100 != 0) || y % 400 == 0;
	if (m == 2 && leap) len = 29;
	return d <= len;
}

class Cursor {
public:
	explicit Cursor(const std::string& s) : s_(s) {}

	bool done() const { return pos_ >= s_.size(); }
	char peek() const { return done() ? '\0' : s_[pos_]; }
	char take() { return s_[pos_++]; }

	bool take_if(char c) {
		if (peek() == c) {
			++pos_;
			return true;
		}
		return false;
	}

	// Fixed-width unsigned integer field.
	long number(int digits, const char* what) {
		long v = 0;
		for (int i = 0; i < digits; ++i) {
			if (done() || !std::isdigit(static_cast<unsigned char>(peek()))) {
				throw std::invalid_argument(std::string("timestamp: expected digit in ") + what + ": '" + s_ + "'");
			}
			v = v * 10 + (take() - '0');
		}
		return v;
	}

	const std::string& text() const { return s_; }

private:
	const std::string& s_;
	std::size_t pos_ = 0;
};

} // namespace

EpochHour parse_hour_utc(const std::string& text) {
	Cursor c(text);
	const long year = c.number(4, "year");
	if (!c.take_if('-')) throw std::invalid_argument("timestamp: expected '-' after year: '" + text + "'");
	const long month = c.number(2, "month");
	if (!c.take_if('-')) throw std::invalid_argument("timestamp: expected '-' after month: '" + text + "'");
	const long day = c.number(2, "day");
	if (!days_in_month_ok(year, static_cast<unsigned>(month), static_cast<unsigned>(day))) {
		throw std::invalid_argument("timestamp: invalid calendar date: '" + text + "'");
	}

	if (!c.take_if('T') && !c.take_if('t') && !c.take_if(' ')) {
		throw std::invalid_argument("timestamp: expected 'T' or ' ' date/time separator: '" + text + "'");
	}

	const long hour = c.number(2, "hour");
	if (!c.take_if(':')) throw std::invalid_argument("timestamp: expected ':' after hour: '" + text + "'");
	const long minute = c.number(2, "minute");
	long second = 0;
	if (c.take_if(':')) second = c.number(2, "second");
	if (hour > 23 || minute > 59 || second > 60) {
		throw std::invalid_argument("timestamp: time of day out of range: '" + text + "'");
	}

	long offset_seconds = 0;
	if (!c.done()) {
		const char z = c.take();
		if (z == 'Z' || z == 'z') {
			// UTC
		} else if (z == '+' || z == '-') {
			const long oh = c.number(2, "offset hour");
			long om = 0;
			if (c.take_if(':')) {
				om = c.number(2, "offset minute");
			} else if (!c.done()) {
				om = c.number(2, "offset minute");
			}
			offset_seconds = (oh * 3600 + om * 60) * (z == '+' ? 1 : -1);
		} else {
			throw std::invalid_argument("timestamp: unexpected trailing characters: '" + text + "'");
		}
	}
	if (!c.done()) throw std::invalid_argument("timestamp: unexpected trailing characters: '" + text + "'");

	const std::int64_t days = days_from_civil(year, static_cast<unsigned>(month), static_cast<unsigned>(day));
	const std::int64_t seconds = days * 86400 + hour * 3600 + minute * 60 + second - offset_seconds;
	if (seconds % 3600 != 0) {
		throw std::invalid_argument("timestamp: sub-hour component after UTC normalization: '" + text + "'");
	}
	return seconds / 3600;
}

std::string format_hour_utc(EpochHour hour) {
	std::int64_t days = hour / 24;
	std::int64_t rem = hour % 24;
	if (rem < 0) {
		rem += 24;
		days -= 1;
	}
	std::int64_t y = 0;
	unsigned m = 0, d = 0;
	civil_from_days(days, y, m, d);
	char buf[48];
	std::snprintf(buf, sizeof(buf), "%04lld-%02u-%02uT%02lld:00:00Z", static_cast<long long>(y), m, d,
	              static_cast<long long>(rem));
	return buf;
}

int hour_of_day(EpochHour hour) {
	const std::int64_t rem = hour % 24;
	return static_cast<int>(rem < 0 ? rem + 24 : rem);
}

} // namespace gridcast
