#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "gridcast/panel.hpp"

namespace gridcast {

/// (sin, cos) position of an hour on the 24-hour circle.
struct TemporalEmbedding {
	double sin_h = 0.0;
	double cos_h = 1.0;
};

/// Computed with exact quadrant reduction so the quarter hours (0, 6, 12,
/// 18) land on exact unit-circle points.
TemporalEmbedding temporal_embedding(int hour);

/// Which lagged copies of a series enter the design matrix.
struct LagSpec {
	enum class Source { outage, tracked, weather };

	Source source = Source::outage;
	std::string feature;   // weather only
	std::vector<int> lags; // strictly positive, ascending, unique

	void validate() const;
	std::string source_label() const;
};

/// One design-matrix column, kept alongside the values so future rows can
/// be rebuilt column-by-column at prediction time.
struct ColumnSpec {
	enum class Kind { weather, sin_hour, cos_hour, lag };

	Kind kind = Kind::weather;
	std::string name;
	std::string feature;                            // weather and weather-lag columns
	LagSpec::Source lag_source = LagSpec::Source::outage; // lag columns
	int lag = 0;                                    // lag columns
};

/// The exogenous regressor block for one county: named columns, target
/// values aligned row-for-row, and the panel row offset of the first row
/// (rows with undefined lags were dropped from the front).
struct DesignMatrix {
	std::vector<std::string> columns;
	std::vector<ColumnSpec> specs;
	Eigen::MatrixXd values; // rows x columns
	Eigen::VectorXd target; // empty for future row blocks
	std::size_t offset = 0;
	std::string county;

	Eigen::Index rows() const { return values.rows(); }
	Eigen::Index cols() const { return values.cols(); }
	std::ptrdiff_t column_index(const std::string& name) const;
};

/// Lagged copies of a series: column k holds series[t - lag_k], with the
/// first max-lag rows NaN. Throws when the series is not longer than the
/// largest lag.
Eigen::MatrixXd add_lags(const Eigen::VectorXd& series, const LagSpec& spec);

/// Assembles the per-county design matrix: selected weather features,
/// the temporal embedding pair, then every configured lag column. Rows
/// with undefined lags are dropped from the front; the target is the
/// outage series over the surviving rows. All consumed cells must be
/// present (run the cleaning chain first).
DesignMatrix build_design_matrix(const PanelDataset& panel, const std::string& county,
                                 const std::vector<std::string>& weather_features,
                                 const std::vector<LagSpec>& lag_config);

/// Default lag layout: outages {1,24}, tracked {1,24}, and {1,6} for each
/// named weather feature.
std::vector<LagSpec> default_lag_config(const std::vector<std::string>& weather_lag_features);

} // namespace gridcast
