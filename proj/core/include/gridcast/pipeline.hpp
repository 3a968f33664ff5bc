#pragma once

#include <Eigen/Dense>
#include <optional>
#include <string>
#include <vector>

#include "gridcast/augmentation.hpp"
#include "gridcast/panel.hpp"
#include "gridcast/sarimax.hpp"
#include "gridcast/selection.hpp"

namespace gridcast {

/// Everything needed to replay training-time preprocessing on future rows.
struct PreprocessState {
	std::vector<std::string> kept_columns;
	Eigen::VectorXd means;
	Eigen::VectorXd sds;
};

/// Training preprocessing, in order: variance filter (<= 1e-8), greedy
/// keep-first correlation filter (|R| > 0.95), z-score. Throws when no
/// column survives (callers fall back to the exog-free levels).
std::pair<DesignMatrix, PreprocessState> preprocess(const DesignMatrix& X_train, double var_threshold = 1e-8,
                                                    double corr_threshold = 0.95);

/// Replays recorded preprocessing: selects kept_columns in recorded order
/// and applies the recorded (mean, sd). Never refits.
DesignMatrix apply_preprocess(const DesignMatrix& X, const PreprocessState& state);

enum class ModelLevel { SARIMAX, ARIMA_EXOG, ARIMA, NAIVE };

std::string level_name(ModelLevel level);

struct FitAttempt {
	ModelLevel level = ModelLevel::SARIMAX;
	bool accepted = false;
	bool converged = false;
	double loglik = 0.0;
	std::string method;
	std::string message;
};

/// A fitted per-county model tagged with its fallback level.
struct CountyModel {
	std::string county;
	ModelLevel level = ModelLevel::NAIVE;
	std::optional<FitResult> fit;    // absent at NAIVE
	double naive_mean = 0.0;
	PreprocessState preprocess;      // exog levels only
	std::vector<ColumnSpec> design_specs;
	std::vector<FitAttempt> attempts;
};

/// The four-level fallback chain: configured order with exog, non-seasonal
/// order with exog, non-seasonal without exog, historical mean. A level is
/// accepted only when its fit converged with a finite log-likelihood; the
/// naive level always succeeds. naive_window limits the mean to the most
/// recent values (0 = full history).
CountyModel fit_with_fallback(const Eigen::VectorXd& y, const DesignMatrix& X, const ModelOrder& order,
                              const OptimOptions& opts, std::size_t naive_window = 0);

/// Future exogenous rows for steps 1..h, mirroring the training columns:
/// weather frozen at its last observed value, embeddings from the future
/// hour-of-day, outage lags from history or earlier predictions, tracked
/// and weather lags from history with a frozen tail. Output is already
/// preprocessed.
DesignMatrix build_future_exog(const PanelDataset& panel, const std::string& county,
                               const std::vector<ColumnSpec>& specs, const PreprocessState& state, int h,
                               const std::vector<double>& predictions_so_far);

/// Steps 1..h in order with recursive exog; every value clamped to >= 0.
std::vector<double> predict_county(const CountyModel& model, const PanelDataset& panel, int h);

/// Non-negative per-county, per-horizon predictions plus statewide sums.
struct ForecastSet {
	std::vector<std::string> counties;
	std::vector<int> horizons;
	std::vector<Eigen::MatrixXd> values;    // per horizon: steps x counties
	std::vector<Eigen::VectorXd> statewide; // per horizon: steps
	EpochHour origin = 0;                   // last training hour
};

struct PipelineConfig {
	ModelOrder order;
	OptimOptions optim;
	std::vector<int> outage_lags{1, 24};
	std::vector<int> tracked_lags{1, 24};
	std::vector<int> weather_lags{1, 6};
	std::vector<std::string> weather_lag_features; // empty = PCA picks from the selection
	std::size_t naive_window = 0;
	bool aggregate = true;
	int jobs = 1;
};

/// Lag layout derived from the config, with weather lag features defaulting
/// to the selection's PCA picks.
std::vector<LagSpec> lag_config_for(const PipelineConfig& config, const SelectionReport& selection);

struct CountyRun {
	std::string county;
	int horizon = 0;
	CountyModel model;
};

struct PipelineRun {
	ForecastSet forecasts;
	std::vector<CountyRun> runs; // ordered by (horizon, county)
};

/// Independent fit + forecast per (county, horizon); statewide sums are
/// exact per-step totals. Deterministic regardless of the worker count.
PipelineRun run_all(const PanelDataset& panel, const SelectionReport& selection,
                    const PipelineConfig& config, const std::vector<int>& horizons);

} // namespace gridcast
