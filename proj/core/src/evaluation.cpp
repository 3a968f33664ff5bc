#include "gridcast/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>
#include <stdexcept>

#include <nlohmann/json.hpp>

#include "gridcast/random.hpp"

namespace gridcast {

double rmse(const Eigen::VectorXd& pred, const Eigen::VectorXd& actual) {
	if (pred.size() != actual.size()) throw std::invalid_argument("rmse: length mismatch");
	if (pred.size() == 0) throw std::invalid_argument("rmse: empty input");
	if (!pred.allFinite() || !actual.allFinite()) throw std::invalid_argument("rmse: non-finite input");
	return std::sqrt((pred - actual).squaredNorm() / static_cast<double>(pred.size()));
}

double zero_baseline(const Eigen::VectorXd& actual) {
	if (actual.size() == 0) throw std::invalid_argument("zero_baseline: empty input");
	if (!actual.allFinite()) throw std::invalid_argument("zero_baseline: non-finite input");
	return std::sqrt(actual.squaredNorm() / static_cast<double>(actual.size()));
}

double improvement_pct(double baseline, double value) {
	if (!(baseline > 0.0)) return 0.0;
	return 100.0 * (baseline - value) / baseline;
}

namespace {

std::string format_fixed(double value, int decimals) {
	char buf[64];
	std::snprintf(buf, sizeof(buf), "%.*f", decimals, value);
	return buf;
}

nlohmann::ordered_json score_to_json(const ScoreReport& score) {
	return {{"method", score.method_name},
	        {"rmse", score.rmse},
	        {"baseline_rmse", score.baseline_rmse},
	        {"improvement_pct", score.improvement_pct}};
}

} // namespace

std::string to_json(const BacktestResult& result) {
	nlohmann::ordered_json j;
	j["entries"] = nlohmann::ordered_json::array();
	for (const auto& entry : result.entries) {
		nlohmann::ordered_json e;
		e["cutoff"] = format_hour_utc(entry.cutoff);
		e["horizon"] = entry.horizon == 0 ? nlohmann::ordered_json("pooled")
		                                  : nlohmann::ordered_json(entry.horizon);
		e["baseline"] = score_to_json(entry.baseline);
		e["model"] = score_to_json(entry.model);
		e["per_county"] = nlohmann::ordered_json::array();
		for (std::size_t i = 0; i < entry.county_model_rmse.size(); ++i) {
			e["per_county"].push_back({{"county", entry.county_model_rmse[i].first},
			                           {"rmse", entry.county_model_rmse[i].second},
			                           {"baseline_rmse", entry.county_baseline_rmse[i].second}});
		}
		j["entries"].push_back(std::move(e));
	}
	return j.dump(2);
}

std::string render_score_table(const std::vector<BacktestEntry>& entries) {
	std::ostringstream out;
	for (const auto& entry : entries) {
		out << "Cutoff " << format_hour_utc(entry.cutoff) << ", horizon ";
		if (entry.horizon == 0) {
			out << "pooled";
		} else {
			out << entry.horizon << "h";
		}
		out << "\n";

		const std::string header_method = "Method";
		const std::size_t method_width =
		    std::max({header_method.size(), entry.baseline.method_name.size(), entry.model.method_name.size()}) +
		    2;
		auto row = [&](const std::string& method, const std::string& rmse_text, const std::string& imp) {
			out << method;
			out << std::string(method_width - method.size(), ' ');
			out << rmse_text;
			out << std::string(rmse_text.size() < 10 ? 10 - rmse_text.size() : 1, ' ');
			out << imp << "\n";
		};
		row("Method", "RMSE", "Improvement");
		row(entry.baseline.method_name, format_fixed(entry.baseline.rmse, 1), "-");
		row(entry.model.method_name, format_fixed(entry.model.rmse, 1),
		    format_fixed(entry.model.improvement_pct, 1) + "%");
		out << "\n";
	}
	return out.str();
}

BacktestResult backtest(const PanelDataset& panel, const std::vector<EpochHour>& cutoffs,
                        const std::vector<int>& horizons, const BacktestConfig& config) {
	if (cutoffs.empty()) throw std::invalid_argument("backtest: no cutoffs");
	if (horizons.empty()) throw std::invalid_argument("backtest: no horizons");
	const int max_horizon = *std::max_element(horizons.begin(), horizons.end());

	BacktestResult result;
	for (const EpochHour cutoff : cutoffs) {
		const auto idx = panel.time().index_of(cutoff);
		if (idx <= 0) {
			throw std::invalid_argument("backtest: cutoff " + format_hour_utc(cutoff) +
			                            " outside the panel grid");
		}
		const auto test_hours = static_cast<std::ptrdiff_t>(panel.n_hours()) - idx;
		if (test_hours < max_horizon) {
			throw std::invalid_argument("backtest: cutoff " + format_hour_utc(cutoff) + " leaves only " +
			                            std::to_string(test_hours) + " test hours for horizon " +
			                            std::to_string(max_horizon));
		}

		auto [train_raw, test] = split_at(panel, cutoff);
		auto [train, cleaning_report] = clean_stage1(train_raw, config.cleaning);
		const SelectionReport selection = select_features(train, config.selection);
		const PipelineRun run = run_all(train, selection, config.pipeline, horizons);

		// Pairs pooled across horizons for the combined entry.
		std::vector<double> pooled_pred, pooled_actual;

		for (std::size_t h_idx = 0; h_idx < horizons.size(); ++h_idx) {
			const int horizon = horizons[h_idx];
			const auto& values = run.forecasts.values[h_idx];

			std::vector<double> pred, actual;
			BacktestEntry entry;
			entry.cutoff = cutoff;
			entry.horizon = horizon;

			for (std::size_t c = 0; c < panel.n_counties(); ++c) {
				std::vector<double> county_pred, county_actual;
				BacktestResult::Curve curve;
				curve.cutoff = cutoff;
				curve.horizon = horizon;
				curve.county = panel.counties()[c];
				for (int step = 0; step < horizon; ++step) {
					const double p = values(step, static_cast<Eigen::Index>(c));
					const double a = test.outages()(step, static_cast<Eigen::Index>(c));
					curve.forecast.push_back(p);
					curve.actual.push_back(a);
					if (is_missing(a)) continue;
					county_pred.push_back(p);
					county_actual.push_back(a);
				}
				result.curves.push_back(std::move(curve));
				if (county_actual.empty()) continue;
				const auto n = static_cast<Eigen::Index>(county_actual.size());
				const Eigen::VectorXd cp = Eigen::Map<const Eigen::VectorXd>(county_pred.data(), n);
				const Eigen::VectorXd ca = Eigen::Map<const Eigen::VectorXd>(county_actual.data(), n);
				entry.county_model_rmse.emplace_back(panel.counties()[c], rmse(cp, ca));
				entry.county_baseline_rmse.emplace_back(panel.counties()[c], zero_baseline(ca));
				pred.insert(pred.end(), county_pred.begin(), county_pred.end());
				actual.insert(actual.end(), county_actual.begin(), county_actual.end());
			}

			if (actual.empty()) {
				throw std::runtime_error("backtest: no observed actuals after cutoff " + format_hour_utc(cutoff));
			}
			const auto n = static_cast<Eigen::Index>(actual.size());
			const Eigen::VectorXd vp = Eigen::Map<const Eigen::VectorXd>(pred.data(), n);
			const Eigen::VectorXd va = Eigen::Map<const Eigen::VectorXd>(actual.data(), n);
			const double baseline = zero_baseline(va);
			const double model = rmse(vp, va);
			entry.baseline = {"Baseline (predict all zeros)", baseline, baseline, 0.0};
			entry.model = {"SARIMAX forecast", model, baseline, improvement_pct(baseline, model)};
			result.entries.push_back(std::move(entry));

			pooled_pred.insert(pooled_pred.end(), pred.begin(), pred.end());
			pooled_actual.insert(pooled_actual.end(), actual.begin(), actual.end());
		}

		if (horizons.size() > 1) {
			BacktestEntry entry;
			entry.cutoff = cutoff;
			entry.horizon = 0;
			const auto n = static_cast<Eigen::Index>(pooled_actual.size());
			const Eigen::VectorXd vp = Eigen::Map<const Eigen::VectorXd>(pooled_pred.data(), n);
			const Eigen::VectorXd va = Eigen::Map<const Eigen::VectorXd>(pooled_actual.data(), n);
			const double baseline = zero_baseline(va);
			const double model = rmse(vp, va);
			entry.baseline = {"Baseline (predict all zeros)", baseline, baseline, 0.0};
			entry.model = {"SARIMAX forecast", model, baseline, improvement_pct(baseline, model)};
			result.entries.push_back(std::move(entry));
		}
	}
	return result;
}

Eigen::VectorXd gen_arma(double phi, double theta, double sigma2, std::size_t length, std::uint64_t seed) {
	if (std::abs(phi) >= 1.0) throw std::invalid_argument("gen_arma: |phi| must be < 1");
	if (std::abs(theta) >= 1.0) throw std::invalid_argument("gen_arma: |theta| must be < 1");
	if (!(sigma2 > 0.0)) throw std::invalid_argument("gen_arma: sigma2 must be positive");
	if (length == 0) throw std::invalid_argument("gen_arma: length must be positive");

	constexpr std::size_t burn_in = 500;
	Rng rng(seed);
	const double sd = std::sqrt(sigma2);
	Eigen::VectorXd out(static_cast<Eigen::Index>(length));
	double prev_y = 0.0;
	double prev_eps = 0.0;
	for (std::size_t t = 0; t < burn_in + length; ++t) {
		const double eps = sd * rng.normal();
		const double y = phi * prev_y + eps + theta * prev_eps;
		prev_y = y;
		prev_eps = eps;
		if (t >= burn_in) out(static_cast<Eigen::Index>(t - burn_in)) = y;
	}
	return out;
}

void SyntheticSpec::validate() const {
	if (counties == 0) throw std::invalid_argument("synthetic spec: need at least one county");
	if (std::abs(phi) >= 1.0) throw std::invalid_argument("synthetic spec: |phi| must be < 1");
	if (std::abs(theta) >= 1.0) throw std::invalid_argument("synthetic spec: |theta| must be < 1");
	if (sigma2 < 0.0) throw std::invalid_argument("synthetic spec: sigma2 must be non-negative");
	if (hours <= 48) throw std::invalid_argument("synthetic spec: hours must exceed twice the max lag (48)");
	if (tracked_missing_rate < 0.0 || tracked_missing_rate >= 1.0) {
		throw std::invalid_argument("synthetic spec: tracked_missing_rate must lie in [0, 1)");
	}
	for (const auto offset : zero_row_offsets) {
		if (offset >= hours) throw std::invalid_argument("synthetic spec: zero-row offset outside the panel");
	}
}

PanelDataset gen_panel(const SyntheticSpec& spec) {
	spec.validate();

	const std::size_t n_drivers = spec.weather_beta.size();
	std::vector<FeatureMeta> features;
	for (std::size_t d = 0; d < n_drivers; ++d) {
		features.push_back({"drv" + std::to_string(d), FeatureMeta::Kind::weather, {}});
	}
	for (std::size_t i = 0; i < spec.noise_features; ++i) {
		features.push_back({"w" + std::to_string(i), FeatureMeta::Kind::weather, {}});
	}
	for (std::size_t i = 0; i < spec.zero_features; ++i) {
		features.push_back({"zero" + std::to_string(i), FeatureMeta::Kind::weather, {}});
	}
	for (std::size_t i = 0; i < spec.unknown_features; ++i) {
		features.push_back({i == 0 ? "unknown" : "unknown_" + std::to_string(i), FeatureMeta::Kind::weather, {}});
	}

	std::vector<std::string> counties;
	for (std::size_t c = 0; c < spec.counties; ++c) {
		char buf[16];
		std::snprintf(buf, sizeof(buf), "C%03zu", c);
		counties.push_back(buf);
	}

	PanelDataset panel(TimeIndex{spec.start, spec.hours}, counties, features);
	Rng rng(spec.seed);
	const auto hours = static_cast<Eigen::Index>(spec.hours);

	auto random_walk = [&](double step_sd) {
		Eigen::VectorXd w(hours);
		double level = rng.normal() * 2.0;
		for (Eigen::Index t = 0; t < hours; ++t) {
			level = 0.995 * level + step_sd * rng.normal();
			w(t) = level;
		}
		return w;
	};

	for (std::size_t c = 0; c < spec.counties; ++c) {
		const auto ci = static_cast<Eigen::Index>(c);

		std::vector<Eigen::VectorXd> drivers;
		for (std::size_t d = 0; d < n_drivers; ++d) {
			drivers.push_back(random_walk(0.35));
			panel.weather(d).col(ci) = drivers.back();
		}
		std::size_t f = n_drivers;
		for (std::size_t i = 0; i < spec.noise_features; ++i, ++f) {
			panel.weather(f).col(ci) = random_walk(0.35);
		}
		for (std::size_t i = 0; i < spec.zero_features; ++i, ++f) {
			panel.weather(f).col(ci).setZero();
		}
		for (std::size_t i = 0; i < spec.unknown_features; ++i, ++f) {
			panel.weather(f).col(ci) = random_walk(0.35);
		}

		Eigen::VectorXd noise = Eigen::VectorXd::Zero(hours);
		if (spec.sigma2 > 0.0) {
			noise = gen_arma(spec.phi, spec.theta, spec.sigma2, spec.hours, rng.next_u64());
		}

		for (Eigen::Index t = 0; t < hours; ++t) {
			const int hour = hour_of_day(spec.start + t);
			double level = spec.base_level +
			               spec.diurnal_amplitude * temporal_embedding(hour).sin_h + noise(t);
			for (std::size_t d = 0; d < n_drivers; ++d) {
				level += spec.weather_beta[d] * drivers[d](t);
			}
			const double outage = std::max(0.0, std::round(level));
			panel.outages()(t, ci) = outage;

			double tracked = std::round(spec.tracked_scale * outage + spec.tracked_noise * rng.normal());
			tracked = std::max(0.0, tracked);
			if (spec.tracked_missing_rate > 0.0 && rng.uniform() < spec.tracked_missing_rate) {
				panel.tracked()(t, ci) = missing_value();
			} else {
				panel.tracked()(t, ci) = tracked;
			}
			panel.set_row_present(static_cast<std::size_t>(t), c);
		}
	}

	for (const auto offset : spec.zero_row_offsets) {
		for (std::size_t f = 0; f < panel.n_features(); ++f) {
			panel.weather(f).row(static_cast<Eigen::Index>(offset)).setZero();
		}
	}
	return panel;
}

} // namespace gridcast
