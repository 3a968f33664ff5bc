#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "gridcast/panel.hpp"

namespace gridcast {

/// Names which series a cleaning operation addresses.
struct ColumnSelector {
	enum class Kind { outage, tracked, weather };

	Kind kind = Kind::tracked;
	std::string feature; // weather only

	static ColumnSelector outage() { return {Kind::outage, {}}; }
	static ColumnSelector tracked() { return {Kind::tracked, {}}; }
	static ColumnSelector weather(std::string name) { return {Kind::weather, std::move(name)}; }

	std::string label() const;
};

struct CleaningReport {
	struct Cell {
		std::string county;
		EpochHour timestamp = 0;
		std::string column;
		bool operator==(const Cell&) const = default;
	};

	std::vector<std::string> dropped_zero_variance;
	std::vector<std::string> dropped_by_name;
	std::vector<Cell> imputed_cells;
	std::vector<EpochHour> repaired_timestamps;

	void merge(CleaningReport other);
};

std::string to_json(const CleaningReport& report);

/// Removes every weather feature whose pooled variance across all counties
/// and hours (present cells only) is exactly zero. All-missing columns are
/// treated as zero-variance. Throws when nothing would survive.
std::pair<PanelDataset, CleaningReport> drop_zero_variance(const PanelDataset& panel);

/// Removes weather features matching any pattern: a trailing '*' matches a
/// name prefix, anything else must match exactly. Zero matches is a no-op.
std::pair<PanelDataset, CleaningReport> drop_by_name(const PanelDataset& panel,
                                                     const std::vector<std::string>& patterns);

/// Fills missing cells of one column per county: interior single gaps get
/// the mean of their neighbors, longer interior runs are linearly
/// interpolated between the bracketing values, and boundary runs copy the
/// single available neighbor. A county with no present value at all is an
/// error.
std::pair<PanelDataset, CleaningReport> impute_adjacent_mean(const PanelDataset& panel,
                                                             const ColumnSelector& column);

/// Detects timestamps where every weather cell across all counties is
/// present and exactly zero, then repairs each affected cell from its
/// temporal neighbors (interior: average / interpolation, boundary single
/// rows: neighbor copy). A run of two or more such timestamps touching the
/// series boundary has no anchor and is an error. Pass explicit timestamps
/// to repair a known list instead of detecting.
std::pair<PanelDataset, CleaningReport> repair_zero_rows(const PanelDataset& panel);
std::pair<PanelDataset, CleaningReport> repair_zero_rows(const PanelDataset& panel,
                                                         const std::vector<EpochHour>& timestamps);

struct CleaningConfig {
	std::vector<std::string> name_patterns{"unknown*"};
	std::vector<ColumnSelector> impute_columns{ColumnSelector::tracked()};
	std::optional<std::vector<EpochHour>> repair_timestamps; // unset = detect
};

/// The Stage-1 chain: zero-variance drop, name drop, imputation, zero-row
/// repair. Idempotent on its own output.
std::pair<PanelDataset, CleaningReport> clean_stage1(const PanelDataset& panel, const CleaningConfig& config);

} // namespace gridcast
