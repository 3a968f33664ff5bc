#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "gridcast/cleaning.hpp"
#include "gridcast/evaluation.hpp"
#include "gridcast/optimize.hpp"
#include "gridcast/panel.hpp"
#include "gridcast/pipeline.hpp"
#include "gridcast/sarimax.hpp"
#include "gridcast/selection.hpp"

namespace gridcast {

/// One run-configuration file drives every subcommand; each constant the
/// pipeline uses is surfaced here with its default.
struct RunConfig {
	std::string input;
	CsvSchema schema;

	std::vector<int> horizons{24, 48};
	ModelOrder order;       // (1,0,1)(0,0,0,0)
	OptimOptions optim;     // 100 iterations, tol 1e-5
	SelectionConfig selection;
	CleaningConfig cleaning;
	std::string selection_report_path; // optional precomputed selection

	std::vector<int> outage_lags{1, 24};
	std::vector<int> tracked_lags{1, 24};
	std::vector<int> weather_lags{1, 6};
	std::vector<std::string> weather_lag_features; // empty = PCA picks

	std::uint64_t seed = 0;
	int jobs = 1;
	std::string out_dir = ".";
	std::size_t naive_window = 0; // 0 = full history
	bool aggregate = true;

	std::vector<EpochHour> backtest_cutoffs;
	SyntheticSpec simulate;

	void validate() const;
	PipelineConfig pipeline_config() const;
	BacktestConfig backtest_config() const;
};

/// Parses the TOML-style run configuration (sections, key = value pairs,
/// strings, numbers, booleans, flat arrays, '#' comments). Unknown keys
/// are an error.
RunConfig parse_run_config(const std::string& text, const std::string& origin);
RunConfig load_run_config(const std::string& path);

} // namespace gridcast
