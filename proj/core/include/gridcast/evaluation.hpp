#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <vector>

#include "gridcast/cleaning.hpp"
#include "gridcast/panel.hpp"
#include "gridcast/pipeline.hpp"
#include "gridcast/selection.hpp"

namespace gridcast {

double rmse(const Eigen::VectorXd& pred, const Eigen::VectorXd& actual);

/// RMSE of the all-zeros prediction: the root mean square of the actuals.
double zero_baseline(const Eigen::VectorXd& actual);

/// 100 * (baseline - value) / baseline; zero when the baseline is zero.
double improvement_pct(double baseline, double value);

struct ScoreReport {
	std::string method_name;
	double rmse = 0.0;
	double baseline_rmse = 0.0;
	double improvement_pct = 0.0;
};

struct BacktestEntry {
	EpochHour cutoff = 0;
	int horizon = 0; // 0 = pooled across horizons
	ScoreReport baseline;
	ScoreReport model;
	std::vector<std::pair<std::string, double>> county_model_rmse;
	std::vector<std::pair<std::string, double>> county_baseline_rmse;
};

struct BacktestResult {
	struct Curve {
		EpochHour cutoff = 0;
		int horizon = 0;
		std::string county;
		std::vector<double> forecast;
		std::vector<double> actual; // NaN where the panel has no value
	};

	std::vector<BacktestEntry> entries;
	std::vector<Curve> curves;
};

std::string to_json(const BacktestResult& result);

/// Two-column comparison table in the shape of the paper's results table
/// (Method / RMSE / Improvement, improvement to one decimal place).
std::string render_score_table(const std::vector<BacktestEntry>& entries);

struct BacktestConfig {
	CleaningConfig cleaning;
	SelectionConfig selection;
	PipelineConfig pipeline;
};

/// Train-before-cutoff / score-after-cutoff protocol. Each cutoff's train
/// window is cleaned and selected independently; predictions are scored
/// pooled over counties and steps, per horizon and pooled across horizons,
/// against the model and the zero baseline.
BacktestResult backtest(const PanelDataset& panel, const std::vector<EpochHour>& cutoffs,
                        const std::vector<int>& horizons, const BacktestConfig& config);

/// ARMA(1,1) simulation with a 500-sample burn-in. Deterministic per seed.
Eigen::VectorXd gen_arma(double phi, double theta, double sigma2, std::size_t length, std::uint64_t seed);

/// Desk-scale synthetic panel: outages are a clamped, rounded sum of a
/// diurnal sinusoid, planted weather-driver effects, and ARMA noise;
/// tracked is a scaled noisy copy; extra feature blocks exercise the
/// cleaning chain.
struct SyntheticSpec {
	std::size_t counties = 10;
	std::size_t hours = 2000;
	double phi = 0.5;
	double theta = 0.2;
	double sigma2 = 1.0; // 0 disables the noise term
	std::vector<double> weather_beta;
	std::uint64_t seed = 1;

	double diurnal_amplitude = 30.0;
	double base_level = 50.0;
	double tracked_scale = 0.8;
	double tracked_noise = 2.0;
	double tracked_missing_rate = 0.0;
	std::size_t noise_features = 0;
	std::size_t zero_features = 0;
	std::size_t unknown_features = 0;
	std::vector<std::size_t> zero_row_offsets;
	EpochHour start = 466344; // 2023-03-15T00:00:00Z

	void validate() const;
};

PanelDataset gen_panel(const SyntheticSpec& spec);

} // namespace gridcast
