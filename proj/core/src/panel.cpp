#include "gridcast/panel.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <map>
#include <set>
#include <stdexcept>

#include <nlohmann/json.hpp>

#include "gridcast/csv.hpp"

namespace gridcast {

namespace {

const std::map<std::string, std::string>& category_table() {
	static const std::map<std::string, std::string> table = [] {
		std::map<std::string, std::string> t;
		auto add = [&t](const std::string& category, std::initializer_list<const char*> names) {
			for (const char* n : names) t[n] = category;
		};
		add("Temperature & Humidity", {"t2m", "mstav", "SBT113"});
		add("Pressure & Geopotential Heights", {"mslma", "gh_1", "gh_3", "plpl"});
		add("Wind & Turbulence", {"u", "v", "u10", "ustm", "vstm", "gust", "wz", "wz_1"});
		add("Severe Weather & Instability", {"cape", "cape_1", "cin", "hail_1", "frzr", "refc"});
		add("Clouds & Radiation", {"sdswrf", "sulwrf", "sdlwrf", "slhtf", "cfnsf", "vis"});
		add("Precipitation & Hydrology", {"sde", "pwat", "cnwat", "pcdb", "fsr", "r"});
		add("Land Surface & Vegetation", {"lsm", "veg", "layth", "mdens"});
		add("Other/Specialized", {"veril"});
		return t;
	}();
	return table;
}

double parse_cell(const std::string& text, std::size_t row_number, const std::string& column) {
	if (text.empty()) return missing_value();
	double v = 0.0;
	const char* begin = text.data();
	const char* end = begin + text.size();
	const auto res = std::from_chars(begin, end, v);
	if (res.ec != std::errc{} || res.ptr != end) {
		throw std::runtime_error("row " + std::to_string(row_number) + ": non-numeric value '" + text +
		                         "' in column '" + column + "'");
	}
	return v;
}

} // namespace

std::string feature_category(const std::string& name) {
	const auto& table = category_table();
	const auto it = table.find(name);
	return it == table.end() ? std::string{} : it->second;
}

const std::vector<std::string>& weather_categories() {
	static const std::vector<std::string> categories = {
	    "Temperature & Humidity",   "Pressure & Geopotential Heights",
	    "Wind & Turbulence",        "Severe Weather & Instability",
	    "Clouds & Radiation",       "Precipitation & Hydrology",
	    "Land Surface & Vegetation", "Other/Specialized",
	};
	return categories;
}

PanelDataset::PanelDataset(TimeIndex time, std::vector<std::string> counties, std::vector<FeatureMeta> features)
    : time_(time), counties_(std::move(counties)), features_(std::move(features)) {
	if (counties_.empty()) throw std::invalid_argument("panel: at least one county required");
	{
		std::set<std::string> seen;
		for (const auto& c : counties_) {
			if (c.empty()) throw std::invalid_argument("panel: empty county id");
			if (!seen.insert(c).second) throw std::invalid_argument("panel: duplicate county id '" + c + "'");
		}
	}
	{
		std::set<std::string> seen;
		for (const auto& f : features_) {
			if (!seen.insert(f.name).second) {
				throw std::invalid_argument("panel: duplicate weather feature '" + f.name + "'");
			}
		}
	}
	const auto rows = static_cast<Eigen::Index>(time_.length);
	const auto cols = static_cast<Eigen::Index>(counties_.size());
	outages_ = Eigen::MatrixXd::Constant(rows, cols, missing_value());
	tracked_ = Eigen::MatrixXd::Constant(rows, cols, missing_value());
	weather_.assign(features_.size(), Eigen::MatrixXd::Constant(rows, cols, missing_value()));
	present_ = Eigen::Matrix<std::uint8_t, Eigen::Dynamic, Eigen::Dynamic>::Zero(rows, cols);
}

std::ptrdiff_t PanelDataset::county_index(const std::string& id) const {
	const auto it = std::find(counties_.begin(), counties_.end(), id);
	return it == counties_.end() ? -1 : it - counties_.begin();
}

std::ptrdiff_t PanelDataset::feature_index(const std::string& name) const {
	for (std::size_t i = 0; i < features_.size(); ++i) {
		if (features_[i].name == name) return static_cast<std::ptrdiff_t>(i);
	}
	return -1;
}

PanelDataset PanelDataset::with_features(const std::vector<std::string>& keep) const {
	std::vector<FeatureMeta> metas;
	std::vector<std::size_t> indices;
	metas.reserve(keep.size());
	for (const auto& name : keep) {
		const auto idx = feature_index(name);
		if (idx < 0) throw std::invalid_argument("panel: unknown weather feature '" + name + "'");
		metas.push_back(features_[static_cast<std::size_t>(idx)]);
		indices.push_back(static_cast<std::size_t>(idx));
	}
	PanelDataset out(time_, counties_, std::move(metas));
	out.outages_ = outages_;
	out.tracked_ = tracked_;
	out.present_ = present_;
	out.duplicates_ = duplicates_;
	for (std::size_t i = 0; i < indices.size(); ++i) {
		out.weather_[i] = weather_[indices[i]];
	}
	return out;
}

PanelDataset load_panel_csv(const std::string& path, const CsvSchema& schema) {
	const CsvTable table = read_csv(path);

	const auto ts_col = table.column(schema.timestamp);
	const auto county_col = table.column(schema.county);
	const auto outage_col = table.column(schema.outages);
	const auto tracked_col = table.column(schema.tracked);
	for (const auto& [col, name] :
	     {std::pair{ts_col, schema.timestamp}, {county_col, schema.county}, {outage_col, schema.outages},
	      {tracked_col, schema.tracked}}) {
		if (col < 0) throw std::runtime_error(path + ": missing mandatory column '" + name + "'");
	}

	std::vector<FeatureMeta> features;
	std::vector<std::size_t> feature_cols;
	for (std::size_t i = 0; i < table.header.size(); ++i) {
		const auto idx = static_cast<std::ptrdiff_t>(i);
		if (idx == ts_col || idx == county_col || idx == outage_col || idx == tracked_col) continue;
		FeatureMeta meta;
		meta.name = table.header[i];
		meta.kind = FeatureMeta::Kind::weather;
		meta.category = feature_category(meta.name);
		features.push_back(std::move(meta));
		feature_cols.push_back(i);
	}

	if (table.rows.empty()) throw std::runtime_error(path + ": no data rows");

	// First pass: the shared grid and the county set.
	EpochHour min_ts = 0, max_ts = 0;
	bool first = true;
	std::set<std::string> county_set;
	std::vector<EpochHour> row_ts(table.rows.size());
	for (std::size_t r = 0; r < table.rows.size(); ++r) {
		const auto& row = table.rows[r];
		EpochHour ts = 0;
		try {
			ts = parse_hour_utc(row[static_cast<std::size_t>(ts_col)]);
		} catch (const std::exception& e) {
			throw std::runtime_error(path + ": row " + std::to_string(r + 2) + ": " + e.what());
		}
		row_ts[r] = ts;
		const auto& county = row[static_cast<std::size_t>(county_col)];
		if (county.empty()) {
			throw std::runtime_error(path + ": row " + std::to_string(r + 2) + ": empty county id");
		}
		county_set.insert(county);
		if (first || ts < min_ts) min_ts = ts;
		if (first || ts > max_ts) max_ts = ts;
		first = false;
	}

	TimeIndex time{min_ts, static_cast<std::size_t>(max_ts - min_ts + 1)};
	std::vector<std::string> counties(county_set.begin(), county_set.end());
	PanelDataset panel(time, std::move(counties), std::move(features));

	for (std::size_t r = 0; r < table.rows.size(); ++r) {
		const auto& row = table.rows[r];
		const std::size_t row_number = r + 2; // 1-based, after header
		const auto t = static_cast<std::size_t>(time.index_of(row_ts[r]));
		const auto c = static_cast<std::size_t>(panel.county_index(row[static_cast<std::size_t>(county_col)]));

		if (panel.row_present(t, c)) {
			panel.record_duplicate({panel.counties()[c], row_ts[r]});
			continue; // first occurrence wins
		}
		panel.set_row_present(t, c);

		const auto ti = static_cast<Eigen::Index>(t);
		const auto ci = static_cast<Eigen::Index>(c);
		try {
			const double outage = parse_cell(row[static_cast<std::size_t>(outage_col)], row_number, schema.outages);
			if (!is_missing(outage) && outage < 0) {
				throw std::runtime_error("row " + std::to_string(row_number) + ": negative outage count");
			}
			const double tracked = parse_cell(row[static_cast<std::size_t>(tracked_col)], row_number, schema.tracked);
			if (!is_missing(tracked) && tracked < 0) {
				throw std::runtime_error("row " + std::to_string(row_number) + ": negative tracked count");
			}
			panel.outages()(ti, ci) = outage;
			panel.tracked()(ti, ci) = tracked;
			for (std::size_t f = 0; f < feature_cols.size(); ++f) {
				panel.weather(f)(ti, ci) = parse_cell(row[feature_cols[f]], row_number, panel.features()[f].name);
			}
		} catch (const std::exception& e) {
			throw std::runtime_error(path + ": " + e.what());
		}
	}
	return panel;
}

ValidationReport validate_grid(const PanelDataset& panel) {
	ValidationReport report;
	report.duplicates = panel.source_duplicates();
	for (std::size_t c = 0; c < panel.n_counties(); ++c) {
		std::size_t run_start = 0;
		std::size_t run_len = 0;
		for (std::size_t i = 0; i <= panel.n_hours(); ++i) {
			const bool absent = i < panel.n_hours() && !panel.row_present(i, c);
			if (absent) {
				if (run_len == 0) run_start = i;
				++run_len;
			} else if (run_len > 0) {
				report.gaps.push_back({panel.counties()[c], panel.time().at(run_start), run_len});
				run_len = 0;
			}
		}
	}
	return report;
}

std::string to_json(const ValidationReport& report) {
	nlohmann::ordered_json j;
	j["duplicates"] = nlohmann::ordered_json::array();
	for (const auto& d : report.duplicates) {
		j["duplicates"].push_back({{"county", d.county}, {"timestamp", format_hour_utc(d.timestamp)}});
	}
	j["gaps"] = nlohmann::ordered_json::array();
	for (const auto& g : report.gaps) {
		j["gaps"].push_back(
		    {{"county", g.county}, {"start", format_hour_utc(g.start)}, {"length", g.length}});
	}
	return j.dump(2);
}

namespace {

PanelDataset slice(const PanelDataset& panel, std::size_t begin, std::size_t length) {
	TimeIndex time{panel.time().at(begin), length};
	PanelDataset out(time, panel.counties(), panel.features());
	const auto b = static_cast<Eigen::Index>(begin);
	const auto n = static_cast<Eigen::Index>(length);
	const auto c = static_cast<Eigen::Index>(panel.n_counties());
	out.outages() = panel.outages().block(b, 0, n, c);
	out.tracked() = panel.tracked().block(b, 0, n, c);
	for (std::size_t f = 0; f < panel.n_features(); ++f) {
		out.weather(f) = panel.weather(f).block(b, 0, n, c);
	}
	for (std::size_t i = 0; i < length; ++i) {
		for (std::size_t cc = 0; cc < panel.n_counties(); ++cc) {
			if (panel.row_present(begin + i, cc)) out.set_row_present(i, cc);
		}
	}
	for (const auto& d : panel.source_duplicates()) {
		if (d.timestamp >= time.start && d.timestamp <= time.last()) out.record_duplicate(d);
	}
	return out;
}

} // namespace

std::pair<PanelDataset, PanelDataset> split_at(const PanelDataset& panel, EpochHour cutoff) {
	const auto& time = panel.time();
	if (cutoff <= time.start || cutoff > time.last()) {
		throw std::invalid_argument("split_at: cutoff " + format_hour_utc(cutoff) +
		                            " must lie strictly inside the time index");
	}
	const auto head = static_cast<std::size_t>(cutoff - time.start);
	return {slice(panel, 0, head), slice(panel, head, time.length - head)};
}

PanelDataset concat(const PanelDataset& a, const PanelDataset& b) {
	if (a.counties() != b.counties()) throw std::invalid_argument("concat: county sets differ");
	if (a.n_features() != b.n_features()) throw std::invalid_argument("concat: feature sets differ");
	for (std::size_t f = 0; f < a.n_features(); ++f) {
		if (a.features()[f].name != b.features()[f].name) {
			throw std::invalid_argument("concat: feature sets differ");
		}
	}
	if (b.time().start != a.time().last() + 1) {
		throw std::invalid_argument("concat: parts are not contiguous");
	}
	TimeIndex time{a.time().start, a.time().length + b.time().length};
	PanelDataset out(time, a.counties(), a.features());
	const auto na = static_cast<Eigen::Index>(a.n_hours());
	const auto nb = static_cast<Eigen::Index>(b.n_hours());
	const auto c = static_cast<Eigen::Index>(a.n_counties());
	out.outages().topRows(na) = a.outages();
	out.outages().bottomRows(nb) = b.outages();
	out.tracked().topRows(na) = a.tracked();
	out.tracked().bottomRows(nb) = b.tracked();
	for (std::size_t f = 0; f < a.n_features(); ++f) {
		out.weather(f).topRows(na) = a.weather(f);
		out.weather(f).bottomRows(nb) = b.weather(f);
	}
	for (std::size_t i = 0; i < a.n_hours(); ++i) {
		for (std::size_t cc = 0; cc < a.n_counties(); ++cc) {
			if (a.row_present(i, cc)) out.set_row_present(i, cc);
		}
	}
	for (std::size_t i = 0; i < b.n_hours(); ++i) {
		for (std::size_t cc = 0; cc < b.n_counties(); ++cc) {
			if (b.row_present(i, cc)) out.set_row_present(a.n_hours() + i, cc);
		}
	}
	for (const auto& d : a.source_duplicates()) out.record_duplicate(d);
	for (const auto& d : b.source_duplicates()) out.record_duplicate(d);
	return out;
}

void write_panel_csv(const PanelDataset& panel, const std::string& path, const CsvSchema& schema) {
	std::ofstream out(path, std::ios::binary);
	if (!out) throw std::runtime_error("cannot write file: " + path);

	out << csv_escape(schema.timestamp) << ',' << csv_escape(schema.county) << ','
	    << csv_escape(schema.outages) << ',' << csv_escape(schema.tracked);
	for (const auto& f : panel.features()) out << ',' << csv_escape(f.name);
	out << '\n';

	auto cell = [](double v) { return is_missing(v) ? std::string{} : format_double(v); };
	for (std::size_t i = 0; i < panel.n_hours(); ++i) {
		for (std::size_t c = 0; c < panel.n_counties(); ++c) {
			if (!panel.row_present(i, c)) continue;
			const auto ti = static_cast<Eigen::Index>(i);
			const auto ci = static_cast<Eigen::Index>(c);
			out << format_hour_utc(panel.time().at(i)) << ',' << csv_escape(panel.counties()[c]) << ','
			    << cell(panel.outages()(ti, ci)) << ',' << cell(panel.tracked()(ti, ci));
			for (std::size_t f = 0; f < panel.n_features(); ++f) {
				out << ',' << cell(panel.weather(f)(ti, ci));
			}
			out << '\n';
		}
	}
	if (!out) throw std::runtime_error("write failed: " + path);
}

} // namespace gridcast
