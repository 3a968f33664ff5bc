#pragma once

#include <string>
#include <vector>

namespace gridcast {

/// A parsed delimited text file: header row plus data rows.
struct CsvTable {
	std::vector<std::string> header;
	std::vector<std::vector<std::string>> rows;

	/// Index of a header column, or -1 when absent.
	std::ptrdiff_t column(const std::string& name) const;
};

/// Reads an RFC-4180-style CSV (double-quoted fields, "" escapes, embedded
/// newlines inside quotes). Throws std::runtime_error on I/O failure or a
/// row whose field count differs from the header.
CsvTable read_csv(const std::string& path);

CsvTable parse_csv(const std::string& content, const std::string& origin);

/// Shortest round-trip decimal rendering of a double (via std::to_chars),
/// used for every numeric artifact so reruns are byte-identical.
std::string format_double(double value);

/// Quotes a field if it contains a delimiter, quote, or newline.
std::string csv_escape(const std::string& field);

} // namespace gridcast
