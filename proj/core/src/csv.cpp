#include "gridcast/csv.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace gridcast {

std::ptrdiff_t CsvTable::column(const std::string& name) const {
	for (std::size_t i = 0; i < header.size(); ++i) {
		if (header[i] == name) return static_cast<std::ptrdiff_t>(i);
	}
	return -1;
}

CsvTable read_csv(const std::string& path) {
	std::ifstream in(path, std::ios::binary);
	if (!in) {
		throw std::runtime_error("cannot open file: " + path);
	}
	std::ostringstream buf;
	buf << in.rdbuf();
	return parse_csv(buf.str(), path);
}

CsvTable parse_csv(const std::string& content, const std::string& origin) {
	std::vector<std::vector<std::string>> records;
	std::vector<std::string> record;
	std::string field;
	bool quoted = false;
	bool any_field = false;

	auto end_field = [&] {
		record.push_back(std::move(field));
		field.clear();
		any_field = false;
	};
	auto end_record = [&] {
		end_field();
		records.push_back(std::move(record));
		record.clear();
	};

	for (std::size_t i = 0; i < content.size(); ++i) {
		const char ch = content[i];
		if (quoted) {
			if (ch == '"') {
				if (i + 1 < content.size() && content[i + 1] == '"') {
					field.push_back('"');
					++i;
				} else {
					quoted = false;
				}
			} else {
				field.push_back(ch);
			}
			continue;
		}
		switch (ch) {
		case '"':
			quoted = true;
			any_field = true;
			break;
		case ',':
			end_field();
			break;
		case '\r':
			break;
		case '\n':
			end_record();
			break;
		default:
			field.push_back(ch);
			any_field = true;
			break;
		}
	}
	if (quoted) {
		throw std::runtime_error(origin + ": unterminated quoted field");
	}
	if (!field.empty() || any_field || !record.empty()) {
		end_record();
	}

	CsvTable table;
	if (records.empty()) {
		throw std::runtime_error(origin + ": empty file");
	}
	table.header = std::move(records.front());
	for (std::size_t r = 1; r < records.size(); ++r) {
		if (records[r].size() == 1 && records[r][0].empty()) continue; // trailing blank line
		if (records[r].size() != table.header.size()) {
			throw std::runtime_error(origin + ": row " + std::to_string(r + 1) + " has " +
			                         std::to_string(records[r].size()) + " fields, header has " +
			                         std::to_string(table.header.size()));
		}
		table.rows.push_back(std::move(records[r]));
	}
	return table;
}

std::string format_double(double value) {
	if (std::isnan(value)) return "nan";
	char buf[64];
	const auto res = std::to_chars(buf, buf + sizeof(buf), value);
	return std::string(buf, res.ptr);
}

std::string csv_escape(const std::string& field) {
	if (field.find_first_of(",\"\n\r") == std::string::npos) return field;
	std::string out = "\"";
	for (char c : field) {
		if (c == '"') out += "\"\"";
		else out.push_back(c);
	}
	out += '"';
	return out;
}

} // namespace gridcast
