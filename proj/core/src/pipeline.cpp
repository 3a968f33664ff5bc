#include "gridcast/pipeline.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <functional>
#include <mutex>
#include <stdexcept>
#include <thread>

namespace gridcast {

namespace {

DesignMatrix subset_columns(const DesignMatrix& X, const std::vector<std::size_t>& keep) {
	DesignMatrix out;
	out.offset = X.offset;
	out.county = X.county;
	out.target = X.target;
	out.values.resize(X.rows(), static_cast<Eigen::Index>(keep.size()));
	for (std::size_t j = 0; j < keep.size(); ++j) {
		out.values.col(static_cast<Eigen::Index>(j)) = X.values.col(static_cast<Eigen::Index>(keep[j]));
		out.columns.push_back(X.columns[keep[j]]);
		if (keep[j] < X.specs.size()) out.specs.push_back(X.specs[keep[j]]);
	}
	return out;
}

} // namespace

std::pair<DesignMatrix, PreprocessState> preprocess(const DesignMatrix& X_train, double var_threshold,
                                                    double corr_threshold) {
	const auto rows = X_train.rows();
	if (rows < 2) throw std::invalid_argument("preprocess: need at least 2 rows");

	const auto cols = X_train.cols();
	const double denom = static_cast<double>(rows - 1);

	// Variance filter.
	std::vector<std::size_t> varying;
	Eigen::VectorXd means(cols), vars(cols);
	for (Eigen::Index j = 0; j < cols; ++j) {
		means(j) = X_train.values.col(j).mean();
		vars(j) = (X_train.values.col(j).array() - means(j)).square().sum() / denom;
		if (vars(j) > var_threshold) varying.push_back(static_cast<std::size_t>(j));
	}
	if (varying.empty()) throw std::runtime_error("preprocess: every column was dropped");

	// Greedy keep-first correlation filter.
	std::vector<std::size_t> kept;
	for (const std::size_t j : varying) {
		const auto jc = static_cast<Eigen::Index>(j);
		bool redundant = false;
		for (const std::size_t i : kept) {
			const auto ic = static_cast<Eigen::Index>(i);
			const double cov =
			    ((X_train.values.col(jc).array() - means(jc)) * (X_train.values.col(ic).array() - means(ic)))
			        .sum() /
			    denom;
			const double corr = cov / std::sqrt(vars(jc) * vars(ic));
			if (std::abs(corr) > corr_threshold) {
				redundant = true;
				break;
			}
		}
		if (!redundant) kept.push_back(j);
	}

	DesignMatrix out = subset_columns(X_train, kept);
	PreprocessState state;
	state.kept_columns = out.columns;
	state.means.resize(static_cast<Eigen::Index>(kept.size()));
	state.sds.resize(static_cast<Eigen::Index>(kept.size()));
	for (std::size_t j = 0; j < kept.size(); ++j) {
		const auto src = static_cast<Eigen::Index>(kept[j]);
		const auto dst = static_cast<Eigen::Index>(j);
		state.means(dst) = means(src);
		state.sds(dst) = std::sqrt(vars(src));
		out.values.col(dst) = (out.values.col(dst).array() - state.means(dst)) / state.sds(dst);
	}
	return {std::move(out), std::move(state)};
}

DesignMatrix apply_preprocess(const DesignMatrix& X, const PreprocessState& state) {
	std::vector<std::size_t> keep;
	for (const auto& name : state.kept_columns) {
		const auto idx = X.column_index(name);
		if (idx < 0) throw std::invalid_argument("apply_preprocess: missing column '" + name + "'");
		keep.push_back(static_cast<std::size_t>(idx));
	}
	DesignMatrix out = subset_columns(X, keep);
	for (Eigen::Index j = 0; j < out.cols(); ++j) {
		out.values.col(j) = (out.values.col(j).array() - state.means(j)) / state.sds(j);
	}
	return out;
}

std::string level_name(ModelLevel level) {
	switch (level) {
	case ModelLevel::SARIMAX:
		return "SARIMAX";
	case ModelLevel::ARIMA_EXOG:
		return "ARIMA_EXOG";
	case ModelLevel::ARIMA:
		return "ARIMA";
	case ModelLevel::NAIVE:
		return "NAIVE";
	}
	return {};
}

CountyModel fit_with_fallback(const Eigen::VectorXd& y, const DesignMatrix& X, const ModelOrder& order,
                              const OptimOptions& opts, std::size_t naive_window) {
	if (y.size() == 0) throw std::invalid_argument("fit_with_fallback: empty series");

	CountyModel model;
	model.county = X.county;
	model.design_specs = X.specs;

	// Exog levels share one preprocessing pass.
	bool have_exog = X.cols() > 0;
	DesignMatrix x_processed;
	PreprocessState state;
	std::string preprocess_error;
	if (have_exog) {
		try {
			auto [xp, st] = preprocess(X);
			x_processed = std::move(xp);
			state = std::move(st);
		} catch (const std::exception& e) {
			preprocess_error = e.what();
			have_exog = false;
		}
	}

	const ModelOrder plain{order.p, order.d, order.q, SeasonalOrder{}};
	const DesignMatrix empty_design{{}, {}, Eigen::MatrixXd(y.size(), 0), Eigen::VectorXd(), 0, X.county};

	struct LevelSpec {
		ModelLevel level;
		ModelOrder order;
		bool with_exog;
	};
	const LevelSpec chain[] = {
	    {ModelLevel::SARIMAX, order, true},
	    {ModelLevel::ARIMA_EXOG, plain, true},
	    {ModelLevel::ARIMA, plain, false},
	};

	std::optional<FitAttempt> previous;
	std::optional<FitResult> previous_fit;
	for (const auto& spec : chain) {
		FitAttempt attempt;
		attempt.level = spec.level;

		if (spec.with_exog && !have_exog) {
			attempt.message = preprocess_error.empty() ? "no exogenous columns" : preprocess_error;
			model.attempts.push_back(attempt);
			previous.reset();
			continue;
		}

		std::optional<FitResult> fitted;
		// Identical order and inputs reproduce the previous attempt exactly.
		if (previous && spec.with_exog && spec.order == order && order == plain) {
			attempt.converged = previous->converged;
			attempt.loglik = previous->loglik;
			attempt.method = previous->method;
			attempt.message = previous->message;
			fitted = previous_fit;
		} else {
			try {
				fitted = fit(y, spec.with_exog ? x_processed : empty_design, spec.order, opts);
				attempt.converged = fitted->converged;
				attempt.loglik = fitted->loglik;
				attempt.method = fitted->method;
				attempt.message = fitted->failure;
			} catch (const std::exception& e) {
				attempt.message = e.what();
			}
		}

		const bool accepted = fitted && fitted->converged && std::isfinite(fitted->loglik);
		attempt.accepted = accepted;
		model.attempts.push_back(attempt);
		if (accepted) {
			model.level = spec.level;
			model.fit = std::move(fitted);
			if (spec.with_exog) model.preprocess = state;
			return model;
		}
		if (spec.with_exog && fitted) {
			previous = attempt;
			previous_fit = std::move(fitted);
		} else {
			previous.reset();
		}
	}

	// Final safeguard: historical mean.
	const Eigen::Index window = naive_window == 0
	                                ? y.size()
	                                : std::min<Eigen::Index>(y.size(), static_cast<Eigen::Index>(naive_window));
	model.level = ModelLevel::NAIVE;
	model.naive_mean = std::max(0.0, y.tail(window).mean());
	FitAttempt naive;
	naive.level = ModelLevel::NAIVE;
	naive.accepted = true;
	naive.converged = true;
	model.attempts.push_back(naive);
	return model;
}

DesignMatrix build_future_exog(const PanelDataset& panel, const std::string& county,
                               const std::vector<ColumnSpec>& specs, const PreprocessState& state, int h,
                               const std::vector<double>& predictions_so_far) {
	if (h < 1) throw std::invalid_argument("build_future_exog: horizon must be positive");
	const auto county_idx = panel.county_index(county);
	if (county_idx < 0) throw std::invalid_argument("build_future_exog: unknown county '" + county + "'");
	const auto ci = static_cast<Eigen::Index>(county_idx);
	const auto n = static_cast<Eigen::Index>(panel.n_hours());

	auto last_observed = [&](const Eigen::MatrixXd& m, const std::string& what) -> double {
		for (Eigen::Index t = n - 1; t >= 0; --t) {
			if (!is_missing(m(t, ci))) return m(t, ci);
		}
		throw std::runtime_error("build_future_exog: no observed value for " + what + " in county '" +
		                         county + "'");
	};

	auto history = [&](const Eigen::MatrixXd& m, Eigen::Index t, const std::string& what) -> double {
		const double v = m(t, ci);
		if (is_missing(v)) {
			throw std::runtime_error("build_future_exog: missing historical cell for " + what +
			                         " at offset " + std::to_string(t));
		}
		return v;
	};

	DesignMatrix raw;
	raw.county = county;
	raw.offset = panel.n_hours();
	raw.specs = specs;
	for (const auto& spec : specs) raw.columns.push_back(spec.name);
	raw.values.resize(h, static_cast<Eigen::Index>(specs.size()));

	for (int step = 1; step <= h; ++step) {
		const Eigen::Index row = step - 1;
		const EpochHour future_hour = panel.time().last() + step;
		for (std::size_t j = 0; j < specs.size(); ++j) {
			const auto& spec = specs[j];
			const auto col = static_cast<Eigen::Index>(j);
			double value = 0.0;
			switch (spec.kind) {
			case ColumnSpec::Kind::weather: {
				const auto f = panel.feature_index(spec.feature);
				if (f < 0) throw std::invalid_argument("build_future_exog: unknown feature '" + spec.feature + "'");
				value = last_observed(panel.weather(static_cast<std::size_t>(f)), spec.feature);
				break;
			}
			case ColumnSpec::Kind::sin_hour:
				value = temporal_embedding(hour_of_day(future_hour)).sin_h;
				break;
			case ColumnSpec::Kind::cos_hour:
				value = temporal_embedding(hour_of_day(future_hour)).cos_h;
				break;
			case ColumnSpec::Kind::lag: {
				const int needed_step = step - spec.lag; // future step the lag refers to
				if (needed_step >= 1) {
					if (spec.lag_source == LagSpec::Source::outage) {
						if (static_cast<std::size_t>(needed_step) > predictions_so_far.size()) {
							throw std::runtime_error(
							    "build_future_exog: prediction for step " + std::to_string(needed_step) +
							    " required before step " + std::to_string(step));
						}
						value = predictions_so_far[static_cast<std::size_t>(needed_step) - 1];
					} else if (spec.lag_source == LagSpec::Source::tracked) {
						value = last_observed(panel.tracked(), "tracked");
					} else {
						const auto f = panel.feature_index(spec.feature);
						if (f < 0) {
							throw std::invalid_argument("build_future_exog: unknown feature '" + spec.feature + "'");
						}
						value = last_observed(panel.weather(static_cast<std::size_t>(f)), spec.feature);
					}
				} else {
					const Eigen::Index t = n - 1 + step - spec.lag;
					if (spec.lag_source == LagSpec::Source::outage) {
						value = history(panel.outages(), t, "outages");
					} else if (spec.lag_source == LagSpec::Source::tracked) {
						value = history(panel.tracked(), t, "tracked");
					} else {
						const auto f = panel.feature_index(spec.feature);
						if (f < 0) {
							throw std::invalid_argument("build_future_exog: unknown feature '" + spec.feature + "'");
						}
						value = history(panel.weather(static_cast<std::size_t>(f)), t, spec.feature);
					}
				}
				break;
			}
			}
			raw.values(row, col) = value;
		}
	}
	return apply_preprocess(raw, state);
}

std::vector<double> predict_county(const CountyModel& model, const PanelDataset& panel, int h) {
	if (h < 1) throw std::invalid_argument("predict_county: horizon must be positive");

	std::vector<double> predictions;
	predictions.reserve(static_cast<std::size_t>(h));

	if (model.level == ModelLevel::NAIVE) {
		predictions.assign(static_cast<std::size_t>(h), model.naive_mean);
		return predictions;
	}

	const FitResult& fitted = *model.fit;
	const bool with_exog = !fitted.exog_columns.empty();
	for (int step = 1; step <= h; ++step) {
		double raw = 0.0;
		if (with_exog) {
			const DesignMatrix x_future =
			    build_future_exog(panel, model.county, model.design_specs, model.preprocess, step, predictions);
			raw = forecast(fitted, step, x_future)(step - 1);
		} else {
			const DesignMatrix empty{{}, {}, Eigen::MatrixXd(0, 0), Eigen::VectorXd(), 0, model.county};
			raw = forecast(fitted, step, empty)(step - 1);
		}
		predictions.push_back(std::max(0.0, raw));
	}
	return predictions;
}

std::vector<LagSpec> lag_config_for(const PipelineConfig& config, const SelectionReport& selection) {
	std::vector<std::string> weather_lag_features = config.weather_lag_features;
	if (weather_lag_features.empty()) {
		for (const auto& name : selection.kept) {
			const auto it = selection.provenance.find(name);
			if (it != selection.provenance.end() &&
			    (it->second == Provenance::pca_pick || it->second == Provenance::both)) {
				weather_lag_features.push_back(name);
			}
		}
	}

	std::vector<LagSpec> lags;
	if (!config.outage_lags.empty()) {
		lags.push_back({LagSpec::Source::outage, {}, config.outage_lags});
	}
	if (!config.tracked_lags.empty()) {
		lags.push_back({LagSpec::Source::tracked, {}, config.tracked_lags});
	}
	if (!config.weather_lags.empty()) {
		for (const auto& name : weather_lag_features) {
			lags.push_back({LagSpec::Source::weather, name, config.weather_lags});
		}
	}
	return lags;
}

namespace {

void parallel_for(std::size_t n, int jobs, const std::function<void(std::size_t)>& body) {
	const int workers = std::max(1, jobs);
	if (workers == 1 || n <= 1) {
		for (std::size_t i = 0; i < n; ++i) body(i);
		return;
	}
	std::atomic<std::size_t> next{0};
	std::exception_ptr error;
	std::mutex error_mutex;
	auto worker = [&] {
		while (true) {
			const std::size_t i = next.fetch_add(1);
			if (i >= n) return;
			try {
				body(i);
			} catch (...) {
				const std::lock_guard<std::mutex> lock(error_mutex);
				if (!error) error = std::current_exception();
			}
		}
	};
	std::vector<std::thread> pool;
	const auto count = static_cast<std::size_t>(std::min<std::size_t>(static_cast<std::size_t>(workers), n));
	pool.reserve(count);
	for (std::size_t i = 0; i < count; ++i) pool.emplace_back(worker);
	for (auto& t : pool) t.join();
	if (error) std::rethrow_exception(error);
}

} // namespace

PipelineRun run_all(const PanelDataset& panel, const SelectionReport& selection,
                    const PipelineConfig& config, const std::vector<int>& horizons) {
	if (horizons.empty()) throw std::invalid_argument("run_all: no horizons requested");
	for (const int h : horizons) {
		if (h < 1) throw std::invalid_argument("run_all: horizons must be positive");
	}

	std::vector<std::string> weather_features;
	for (const auto& name : selection.kept) {
		if (panel.feature_index(name) >= 0) weather_features.push_back(name);
	}
	const std::vector<LagSpec> lags = lag_config_for(config, selection);

	PipelineRun run;
	run.forecasts.counties = panel.counties();
	run.forecasts.horizons = horizons;
	run.forecasts.origin = panel.time().last();

	const std::size_t n_counties = panel.n_counties();
	const std::size_t n_tasks = n_counties * horizons.size();
	std::vector<CountyRun> results(n_tasks);
	std::vector<std::vector<double>> predictions(n_tasks);

	parallel_for(n_tasks, config.jobs, [&](std::size_t task) {
		const std::size_t h_idx = task / n_counties;
		const std::size_t c_idx = task % n_counties;
		const std::string& county = panel.counties()[c_idx];
		const int horizon = horizons[h_idx];

		const DesignMatrix design = build_design_matrix(panel, county, weather_features, lags);
		CountyModel model = fit_with_fallback(design.target, design, config.order, config.optim,
		                                      config.naive_window);
		predictions[task] = predict_county(model, panel, horizon);
		results[task] = CountyRun{county, horizon, std::move(model)};
	});

	for (std::size_t h_idx = 0; h_idx < horizons.size(); ++h_idx) {
		const int horizon = horizons[h_idx];
		Eigen::MatrixXd values(horizon, static_cast<Eigen::Index>(n_counties));
		for (std::size_t c_idx = 0; c_idx < n_counties; ++c_idx) {
			const auto& pred = predictions[h_idx * n_counties + c_idx];
			for (int step = 0; step < horizon; ++step) {
				values(step, static_cast<Eigen::Index>(c_idx)) = pred[static_cast<std::size_t>(step)];
			}
		}
		Eigen::VectorXd sums = Eigen::VectorXd::Zero(horizon);
		if (config.aggregate) {
			for (int step = 0; step < horizon; ++step) {
				double total = 0.0;
				for (Eigen::Index c = 0; c < values.cols(); ++c) total += values(step, c);
				sums(step) = total;
			}
		}
		run.forecasts.values.push_back(std::move(values));
		run.forecasts.statewide.push_back(std::move(sums));
	}
	run.runs = std::move(results);
	return run;
}

} // namespace gridcast
