#include "gridcast/cleaning.hpp"

#include <algorithm>
#include <stdexcept>

#include <nlohmann/json.hpp>

namespace gridcast {

std::string ColumnSelector::label() const {
	switch (kind) {
	case Kind::outage:
		return "outages";
	case Kind::tracked:
		return "tracked";
	case Kind::weather:
		return feature;
	}
	return {};
}

void CleaningReport::merge(CleaningReport other) {
	auto move_into = [](auto& dst, auto& src) {
		dst.insert(dst.end(), std::make_move_iterator(src.begin()), std::make_move_iterator(src.end()));
	};
	move_into(dropped_zero_variance, other.dropped_zero_variance);
	move_into(dropped_by_name, other.dropped_by_name);
	move_into(imputed_cells, other.imputed_cells);
	move_into(repaired_timestamps, other.repaired_timestamps);
}

std::string to_json(const CleaningReport& report) {
	nlohmann::ordered_json j;
	j["dropped_zero_variance"] = report.dropped_zero_variance;
	j["dropped_by_name"] = report.dropped_by_name;
	j["imputed_cells"] = nlohmann::ordered_json::array();
	for (const auto& cell : report.imputed_cells) {
		j["imputed_cells"].push_back({{"county", cell.county},
		                              {"timestamp", format_hour_utc(cell.timestamp)},
		                              {"column", cell.column}});
	}
	j["repaired_timestamps"] = nlohmann::ordered_json::array();
	for (const auto ts : report.repaired_timestamps) {
		j["repaired_timestamps"].push_back(format_hour_utc(ts));
	}
	return j.dump(2);
}

std::pair<PanelDataset, CleaningReport> drop_zero_variance(const PanelDataset& panel) {
	if (panel.n_features() == 0) {
		throw std::invalid_argument("drop_zero_variance: panel has no weather features");
	}
	CleaningReport report;
	std::vector<std::string> keep;
	for (std::size_t f = 0; f < panel.n_features(); ++f) {
		const auto& m = panel.weather(f);
		bool constant = true;
		bool seen = false;
		double first = 0.0;
		for (Eigen::Index i = 0; constant && i < m.size(); ++i) {
			const double v = m(i);
			if (is_missing(v)) continue;
			if (!seen) {
				first = v;
				seen = true;
			} else if (v != first) {
				constant = false;
			}
		}
		if (constant) {
			report.dropped_zero_variance.push_back(panel.features()[f].name);
		} else {
			keep.push_back(panel.features()[f].name);
		}
	}
	if (keep.empty()) {
		throw std::runtime_error("drop_zero_variance: every weather feature is constant; nothing left to model");
	}
	return {panel.with_features(keep), std::move(report)};
}

namespace {

bool matches_pattern(const std::string& name, const std::string& pattern) {
	if (!pattern.empty() && pattern.back() == '*') {
		return name.compare(0, pattern.size() - 1, pattern, 0, pattern.size() - 1) == 0;
	}
	return name == pattern;
}

} // namespace

std::pair<PanelDataset, CleaningReport> drop_by_name(const PanelDataset& panel,
                                                     const std::vector<std::string>& patterns) {
	if (patterns.empty()) throw std::invalid_argument("drop_by_name: pattern list is empty");
	CleaningReport report;
	std::vector<std::string> keep;
	for (const auto& meta : panel.features()) {
		const bool hit = std::any_of(patterns.begin(), patterns.end(),
		                             [&](const std::string& p) { return matches_pattern(meta.name, p); });
		if (hit) {
			report.dropped_by_name.push_back(meta.name);
		} else {
			keep.push_back(meta.name);
		}
	}
	if (report.dropped_by_name.empty()) {
		return {panel, std::move(report)};
	}
	if (keep.empty()) {
		throw std::runtime_error("drop_by_name: every weather feature matched; nothing left to model");
	}
	return {panel.with_features(keep), std::move(report)};
}

namespace {

// Fills missing runs of one county column in place; records filled rows.
// Interior runs interpolate linearly between the bracketing present values;
// boundary runs copy the single available neighbor.
void fill_series(Eigen::Ref<Eigen::VectorXd> series, const std::string& county, const std::string& label,
                 std::vector<std::size_t>& filled_rows) {
	const auto n = series.size();
	Eigen::Index i = 0;
	while (i < n) {
		if (!is_missing(series(i))) {
			++i;
			continue;
		}
		Eigen::Index run_end = i;
		while (run_end + 1 < n && is_missing(series(run_end + 1))) ++run_end;

		const bool has_left = i > 0;
		const bool has_right = run_end + 1 < n;
		if (!has_left && !has_right) {
			throw std::runtime_error("impute: county '" + county + "' column '" + label +
			                         "' has no present value");
		}
		if (has_left && has_right) {
			const double lo = series(i - 1);
			const double hi = series(run_end + 1);
			const auto span = static_cast<double>(run_end - i + 2);
			for (Eigen::Index t = i; t <= run_end; ++t) {
				series(t) = lo + (hi - lo) * static_cast<double>(t - i + 1) / span;
			}
		} else {
			const double anchor = has_left ? series(i - 1) : series(run_end + 1);
			for (Eigen::Index t = i; t <= run_end; ++t) series(t) = anchor;
		}
		for (Eigen::Index t = i; t <= run_end; ++t) filled_rows.push_back(static_cast<std::size_t>(t));
		i = run_end + 1;
	}
}

} // namespace

std::pair<PanelDataset, CleaningReport> impute_adjacent_mean(const PanelDataset& panel,
                                                             const ColumnSelector& column) {
	PanelDataset out = panel;
	CleaningReport report;

	Eigen::MatrixXd* target = nullptr;
	switch (column.kind) {
	case ColumnSelector::Kind::outage:
		target = &out.outages();
		break;
	case ColumnSelector::Kind::tracked:
		target = &out.tracked();
		break;
	case ColumnSelector::Kind::weather: {
		const auto idx = out.feature_index(column.feature);
		if (idx < 0) throw std::invalid_argument("impute: unknown weather feature '" + column.feature + "'");
		target = &out.weather(static_cast<std::size_t>(idx));
		break;
	}
	}

	const std::string label = column.label();
	for (std::size_t c = 0; c < out.n_counties(); ++c) {
		std::vector<std::size_t> filled;
		fill_series(target->col(static_cast<Eigen::Index>(c)), out.counties()[c], label, filled);
		for (const auto row : filled) {
			report.imputed_cells.push_back({out.counties()[c], out.time().at(row), label});
		}
	}
	return {std::move(out), std::move(report)};
}

namespace {

std::vector<EpochHour> detect_zero_rows(const PanelDataset& panel) {
	std::vector<EpochHour> hits;
	for (std::size_t i = 0; i < panel.n_hours(); ++i) {
		bool all_zero = panel.n_features() > 0;
		for (std::size_t f = 0; all_zero && f < panel.n_features(); ++f) {
			const auto& m = panel.weather(f);
			for (std::size_t c = 0; all_zero && c < panel.n_counties(); ++c) {
				const double v = m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(c));
				if (is_missing(v) || v != 0.0) all_zero = false;
			}
		}
		if (all_zero) hits.push_back(panel.time().at(i));
	}
	return hits;
}

std::pair<PanelDataset, CleaningReport> repair_rows(const PanelDataset& panel,
                                                    const std::vector<EpochHour>& timestamps) {
	PanelDataset out = panel;
	CleaningReport report;
	if (timestamps.empty()) return {std::move(out), std::move(report)};

	std::vector<std::size_t> rows;
	for (const auto ts : timestamps) {
		const auto idx = out.time().index_of(ts);
		if (idx < 0) {
			throw std::invalid_argument("repair_zero_rows: timestamp " + format_hour_utc(ts) +
			                            " outside the panel grid");
		}
		rows.push_back(static_cast<std::size_t>(idx));
	}
	std::sort(rows.begin(), rows.end());
	rows.erase(std::unique(rows.begin(), rows.end()), rows.end());

	const auto n = out.n_hours();
	std::vector<char> anomalous(n, 0);
	for (const auto r : rows) anomalous[r] = 1;

	// Boundary runs of length >= 2 have no anchor on one side.
	for (std::size_t idx = 0; idx < rows.size();) {
		std::size_t j = idx;
		while (j + 1 < rows.size() && rows[j + 1] == rows[j] + 1) ++j;
		const std::size_t run_len = j - idx + 1;
		const bool at_boundary = rows[idx] == 0 || rows[j] == n - 1;
		if (at_boundary && run_len >= 2) {
			throw std::runtime_error("repair_zero_rows: " + std::to_string(run_len) +
			                         " consecutive anomalous timestamps at the series boundary starting " +
			                         format_hour_utc(out.time().at(rows[idx])));
		}
		idx = j + 1;
	}

	// Interpolate each anomalous run from the bracketing normal rows; a
	// single-row interior run lands exactly on the (t-1, t+1) mean. Only
	// anomalous rows change.
	for (std::size_t idx = 0; idx < rows.size();) {
		std::size_t j = idx;
		while (j + 1 < rows.size() && rows[j + 1] == rows[j] + 1) ++j;
		const std::size_t lo_row = rows[idx];
		const std::size_t hi_row = rows[j];
		const bool has_left = lo_row > 0;
		const bool has_right = hi_row + 1 < n;

		for (std::size_t f = 0; f < out.n_features(); ++f) {
			auto& m = out.weather(f);
			for (std::size_t c = 0; c < out.n_counties(); ++c) {
				const auto ci = static_cast<Eigen::Index>(c);
				const double left = has_left ? m(static_cast<Eigen::Index>(lo_row) - 1, ci) : missing_value();
				const double right = has_right ? m(static_cast<Eigen::Index>(hi_row) + 1, ci) : missing_value();
				if ((has_left && is_missing(left)) || (has_right && is_missing(right))) {
					throw std::runtime_error("repair_zero_rows: neighbor cell missing for feature '" +
					                         out.features()[f].name + "', county '" + out.counties()[c] +
					                         "' near " + format_hour_utc(out.time().at(lo_row)));
				}
				const auto span = static_cast<double>(hi_row - lo_row + 2);
				for (std::size_t r = lo_row; r <= hi_row; ++r) {
					double v = 0.0;
					if (has_left && has_right) {
						v = left + (right - left) * static_cast<double>(r - lo_row + 1) / span;
					} else {
						v = has_left ? left : right;
					}
					m(static_cast<Eigen::Index>(r), ci) = v;
				}
			}
		}
		idx = j + 1;
	}
	for (const auto r : rows) report.repaired_timestamps.push_back(out.time().at(r));
	return {std::move(out), std::move(report)};
}

} // namespace

std::pair<PanelDataset, CleaningReport> repair_zero_rows(const PanelDataset& panel) {
	if (panel.n_hours() < 3) throw std::invalid_argument("repair_zero_rows: need at least 3 timestamps");
	return repair_rows(panel, detect_zero_rows(panel));
}

std::pair<PanelDataset, CleaningReport> repair_zero_rows(const PanelDataset& panel,
                                                         const std::vector<EpochHour>& timestamps) {
	if (panel.n_hours() < 3) throw std::invalid_argument("repair_zero_rows: need at least 3 timestamps");
	return repair_rows(panel, timestamps);
}

std::pair<PanelDataset, CleaningReport> clean_stage1(const PanelDataset& panel, const CleaningConfig& config) {
	auto [p1, report] = drop_zero_variance(panel);
	if (!config.name_patterns.empty()) {
		auto [p2, r2] = drop_by_name(p1, config.name_patterns);
		p1 = std::move(p2);
		report.merge(std::move(r2));
	}
	for (const auto& column : config.impute_columns) {
		auto [p3, r3] = impute_adjacent_mean(p1, column);
		p1 = std::move(p3);
		report.merge(std::move(r3));
	}
	auto [p4, r4] = config.repair_timestamps ? repair_zero_rows(p1, *config.repair_timestamps)
	                                         : repair_zero_rows(p1);
	report.merge(std::move(r4));
	return {std::move(p4), std::move(report)};
}

} // namespace gridcast
