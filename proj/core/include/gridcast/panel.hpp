#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include "gridcast/time_index.hpp"

namespace gridcast {

/// Marker for a cell that is absent from the source data.
inline double missing_value() { return std::numeric_limits<double>::quiet_NaN(); }
inline bool is_missing(double v) { return std::isnan(v); }

struct FeatureMeta {
	enum class Kind { weather, outage, tracked, embedding, lag };

	std::string name;
	Kind kind = Kind::weather;
	std::string category; // one of the eight weather classes when known
};

/// Default category for the meteorological parameters with a known class;
/// empty for anything else.
std::string feature_category(const std::string& name);

/// Names of the eight weather parameter classes, in report order.
const std::vector<std::string>& weather_categories();

/// Column-name mapping for the long-format input CSV. Every column not
/// claimed here is treated as a weather feature.
struct CsvSchema {
	std::string timestamp = "timestamp";
	std::string county = "county";
	std::string outages = "outages";
	std::string tracked = "tracked";
};

/// The hourly time x county x column grid consumed by the whole pipeline.
/// Immutable in normal use: cleaning operations return transformed copies.
/// Matrices are (hour, county); missing cells hold NaN.
class PanelDataset {
public:
	struct SourceDuplicate {
		std::string county;
		EpochHour timestamp = 0;
		bool operator==(const SourceDuplicate&) const = default;
	};

	PanelDataset(TimeIndex time, std::vector<std::string> counties, std::vector<FeatureMeta> features);

	const TimeIndex& time() const { return time_; }
	const std::vector<std::string>& counties() const { return counties_; }
	const std::vector<FeatureMeta>& features() const { return features_; }

	std::size_t n_hours() const { return time_.length; }
	std::size_t n_counties() const { return counties_.size(); }
	std::size_t n_features() const { return features_.size(); }

	std::ptrdiff_t county_index(const std::string& id) const;
	std::ptrdiff_t feature_index(const std::string& name) const;

	const Eigen::MatrixXd& outages() const { return outages_; }
	const Eigen::MatrixXd& tracked() const { return tracked_; }
	const Eigen::MatrixXd& weather(std::size_t feature) const { return weather_[feature]; }

	Eigen::MatrixXd& outages() { return outages_; }
	Eigen::MatrixXd& tracked() { return tracked_; }
	Eigen::MatrixXd& weather(std::size_t feature) { return weather_[feature]; }

	/// Whether the source file carried a row for (hour i, county c).
	bool row_present(std::size_t i, std::size_t c) const { return present_(i, c) != 0; }
	void set_row_present(std::size_t i, std::size_t c) { present_(i, c) = 1; }

	const std::vector<SourceDuplicate>& source_duplicates() const { return duplicates_; }
	void record_duplicate(SourceDuplicate d) { duplicates_.push_back(std::move(d)); }

	/// Copy with a subset of weather features (order given by keep).
	PanelDataset with_features(const std::vector<std::string>& keep) const;

private:
	TimeIndex time_;
	std::vector<std::string> counties_;
	std::vector<FeatureMeta> features_;
	Eigen::MatrixXd outages_;
	Eigen::MatrixXd tracked_;
	std::vector<Eigen::MatrixXd> weather_;
	Eigen::Matrix<std::uint8_t, Eigen::Dynamic, Eigen::Dynamic> present_;
	std::vector<SourceDuplicate> duplicates_;
};

struct ValidationReport {
	struct Gap {
		std::string county;
		EpochHour start = 0;
		std::size_t length = 0;
		bool operator==(const Gap&) const = default;
	};

	std::vector<PanelDataset::SourceDuplicate> duplicates;
	std::vector<Gap> gaps;

	bool clean() const { return duplicates.empty() && gaps.empty(); }
};

std::string to_json(const ValidationReport& report);

/// Loads a long-format CSV (one row per timestamp x county) onto a single
/// shared hourly grid spanning [min ts, max ts]. Cells without a source row
/// stay missing; empty numeric fields stay missing; duplicates keep the
/// first occurrence and are recorded for validate_grid. Errors name the
/// offending row.
PanelDataset load_panel_csv(const std::string& path, const CsvSchema& schema);

/// Reports source duplicates and per-county hour gaps. Never modifies.
ValidationReport validate_grid(const PanelDataset& panel);

/// Splits on the shared grid: first part covers [start, cutoff), second
/// [cutoff, end]. Throws when the cutoff would leave either side empty.
std::pair<PanelDataset, PanelDataset> split_at(const PanelDataset& panel, EpochHour cutoff);

/// Inverse of split_at: b must start exactly one hour after a ends and
/// carry the same counties and features.
PanelDataset concat(const PanelDataset& a, const PanelDataset& b);

void write_panel_csv(const PanelDataset& panel, const std::string& path, const CsvSchema& schema);

} // namespace gridcast
