#include "cli.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <numeric>
#include <set>
#include <sstream>
#include <thread>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <gridcast/cleaning.hpp>
#include <gridcast/config.hpp>
#include <gridcast/csv.hpp>
#include <gridcast/evaluation.hpp>
#include <gridcast/panel.hpp>
#include <gridcast/pipeline.hpp>
#include <gridcast/selection.hpp>

#include "svg_plot.hpp"

namespace gridcast::cli {

namespace {

namespace fs = std::filesystem;

struct CommonFlags {
	std::string config_path;
	std::string out_dir;
	int jobs = -1;
	std::int64_t seed = -1;
};

void add_common_flags(CLI::App* cmd, CommonFlags& flags) {
	cmd->add_option("--config", flags.config_path, "run-configuration TOML file")->required();
	cmd->add_option("--out", flags.out_dir, "output directory (overrides the config)");
	cmd->add_option("--jobs", flags.jobs, "worker threads (overrides the config)");
	cmd->add_option("--seed", flags.seed, "random seed (overrides the config)");
}

RunConfig resolve_config(const CommonFlags& flags) {
	RunConfig config = load_run_config(flags.config_path);
	if (!flags.out_dir.empty()) config.out_dir = flags.out_dir;
	if (flags.jobs >= 0) config.jobs = flags.jobs;
	if (flags.seed >= 0) {
		config.seed = static_cast<std::uint64_t>(flags.seed);
		config.selection.seed = config.seed;
		config.simulate.seed = config.seed;
	}
	if (config.jobs == 0) {
		config.jobs = std::max(1u, std::thread::hardware_concurrency());
	}
	return config;
}

void write_text(const fs::path& path, const std::string& content) {
	std::ofstream out(path, std::ios::binary);
	if (!out) throw std::runtime_error("cannot write file: " + path.string());
	out << content;
	if (!out) throw std::runtime_error("write failed: " + path.string());
}

fs::path prepare_out_dir(const RunConfig& config) {
	const fs::path dir = config.out_dir.empty() ? fs::path(".") : fs::path(config.out_dir);
	fs::create_directories(dir);
	return dir;
}

PanelDataset load_input(const RunConfig& config) {
	if (config.input.empty()) throw std::runtime_error("config: input.path is not set");
	return load_panel_csv(config.input, config.schema);
}

std::pair<PanelDataset, CleaningReport> clean_input(const PanelDataset& panel, const RunConfig& config) {
	return clean_stage1(panel, config.cleaning);
}

SelectionReport selection_for(const PanelDataset& cleaned, const RunConfig& config) {
	if (!config.selection_report_path.empty()) {
		std::ifstream in(config.selection_report_path, std::ios::binary);
		if (!in) throw std::runtime_error("cannot open selection report: " + config.selection_report_path);
		std::ostringstream buf;
		buf << in.rdbuf();
		return selection_report_from_json(buf.str());
	}
	return select_features(cleaned, config.selection);
}

int cmd_clean(const CommonFlags& flags, const std::vector<std::string>& timestamps) {
	RunConfig config = resolve_config(flags);
	if (!timestamps.empty()) {
		std::vector<EpochHour> hours;
		for (const auto& t : timestamps) hours.push_back(parse_hour_utc(t));
		config.cleaning.repair_timestamps = std::move(hours);
	}
	const fs::path dir = prepare_out_dir(config);

	const PanelDataset panel = load_input(config);
	write_text(dir / "validation.json", to_json(validate_grid(panel)));
	auto [cleaned, report] = clean_input(panel, config);
	write_panel_csv(cleaned, (dir / "cleaned.csv").string(), config.schema);
	write_text(dir / "cleaning_report.json", to_json(report));
	std::cout << "clean: " << cleaned.n_features() << " features kept, artifacts in " << dir.string() << "\n";
	return 0;
}

std::string render_selection_table(const SelectionReport& report) {
	std::ostringstream out;
	out << "Selected features by category\n";
	out << "-----------------------------\n";
	std::set<std::string> printed;
	auto emit_group = [&](const std::string& category) {
		std::vector<std::string> members;
		for (const auto& name : report.kept) {
			if (feature_category(name) == category) members.push_back(name);
		}
		if (members.empty()) return;
		out << category << ":\n";
		for (const auto& name : members) {
			out << "  " << name << "  (" << provenance_name(report.provenance.at(name)) << ")\n";
			printed.insert(name);
		}
	};
	for (const auto& category : weather_categories()) emit_group(category);

	std::vector<std::string> rest;
	for (const auto& name : report.kept) {
		if (!printed.count(name)) rest.push_back(name);
	}
	if (!rest.empty()) {
		out << "Uncategorized:\n";
		for (const auto& name : rest) {
			out << "  " << name << "  (" << provenance_name(report.provenance.at(name)) << ")\n";
		}
	}
	out << "\nKept " << report.kept.size() << ", dropped " << report.dropped.size() << "\n";
	return out.str();
}

void write_pca_reports(const PanelDataset& cleaned, const RunConfig& config, const fs::path& dir) {
	std::vector<std::string> features;
	for (const auto& meta : cleaned.features()) features.push_back(meta.name);
	const std::size_t max_rank = std::min<std::size_t>(features.size(), cleaned.n_hours() * cleaned.n_counties());
	const std::size_t n_components = std::min(config.selection.pca_components, max_rank);
	const PcaResult pca = pca_fit(cleaned, features, n_components);

	// Loading table: top 5 positive and top 5 negative per leading component.
	std::ostringstream loadings;
	loadings << "component,feature,loading\n";
	const std::size_t shown = std::min<std::size_t>(3, pca.n_components);
	for (std::size_t c = 0; c < shown; ++c) {
		const Eigen::RowVectorXd row = pca.loadings.row(static_cast<Eigen::Index>(c));
		std::vector<Eigen::Index> order(static_cast<std::size_t>(row.size()));
		std::iota(order.begin(), order.end(), 0);
		std::stable_sort(order.begin(), order.end(),
		                 [&](Eigen::Index a, Eigen::Index b) { return row(a) > row(b); });
		const std::size_t take = std::min<std::size_t>(5, order.size());
		for (std::size_t i = 0; i < take; ++i) {
			loadings << "PC" << (c + 1) << ',' << csv_escape(features[static_cast<std::size_t>(order[i])]) << ','
			         << format_double(row(order[i])) << '\n';
		}
		for (std::size_t i = 0; i < take; ++i) {
			const auto idx = order[order.size() - take + i];
			loadings << "PC" << (c + 1) << ',' << csv_escape(features[static_cast<std::size_t>(idx)]) << ','
			         << format_double(row(idx)) << '\n';
		}
	}
	write_text(dir / "pca_loadings.csv", loadings.str());

	std::ostringstream variance;
	variance << "component,explained_variance_ratio,cumulative\n";
	double cumulative = 0.0;
	for (std::size_t c = 0; c < pca.n_components; ++c) {
		cumulative += pca.explained_variance_ratio(static_cast<Eigen::Index>(c));
		variance << (c + 1) << ',' << format_double(pca.explained_variance_ratio(static_cast<Eigen::Index>(c)))
		         << ',' << format_double(cumulative) << '\n';
	}
	write_text(dir / "pca_explained_variance.csv", variance.str());
}

int cmd_select(const CommonFlags& flags) {
	const RunConfig config = resolve_config(flags);
	const fs::path dir = prepare_out_dir(config);

	const PanelDataset panel = load_input(config);
	auto [cleaned, cleaning_report] = clean_input(panel, config);
	const SelectionReport report = select_features(cleaned, config.selection);

	write_text(dir / "selection.json", to_json(report));
	write_text(dir / "selection_table.txt", render_selection_table(report));
	write_pca_reports(cleaned, config, dir);
	std::cout << "select: kept " << report.kept.size() << " features, artifacts in " << dir.string() << "\n";
	return 0;
}

std::string forecast_csv(const PipelineRun& run) {
	std::ostringstream out;
	out << "county,horizon,step,timestamp,prediction\n";
	const auto& fs_set = run.forecasts;
	for (std::size_t h_idx = 0; h_idx < fs_set.horizons.size(); ++h_idx) {
		const int horizon = fs_set.horizons[h_idx];
		for (std::size_t c = 0; c < fs_set.counties.size(); ++c) {
			for (int step = 1; step <= horizon; ++step) {
				out << csv_escape(fs_set.counties[c]) << ',' << horizon << ',' << step << ','
				    << format_hour_utc(fs_set.origin + step) << ','
				    << format_double(fs_set.values[h_idx](step - 1, static_cast<Eigen::Index>(c))) << '\n';
			}
		}
	}
	return out.str();
}

std::string statewide_csv(const PipelineRun& run) {
	std::ostringstream out;
	out << "horizon,step,timestamp,prediction\n";
	const auto& fs_set = run.forecasts;
	for (std::size_t h_idx = 0; h_idx < fs_set.horizons.size(); ++h_idx) {
		const int horizon = fs_set.horizons[h_idx];
		for (int step = 1; step <= horizon; ++step) {
			out << horizon << ',' << step << ',' << format_hour_utc(fs_set.origin + step) << ','
			    << format_double(fs_set.statewide[h_idx](step - 1)) << '\n';
		}
	}
	return out.str();
}

std::string audit_json(const PipelineRun& run) {
	nlohmann::ordered_json j = nlohmann::ordered_json::object();
	for (const auto& county_run : run.runs) {
		nlohmann::ordered_json entry;
		entry["level"] = level_name(county_run.model.level);
		entry["attempts"] = nlohmann::ordered_json::array();
		for (const auto& attempt : county_run.model.attempts) {
			nlohmann::ordered_json a;
			a["level"] = level_name(attempt.level);
			a["accepted"] = attempt.accepted;
			a["converged"] = attempt.converged;
			a["loglik"] = std::isfinite(attempt.loglik) ? nlohmann::ordered_json(attempt.loglik)
			                                            : nlohmann::ordered_json(nullptr);
			if (!attempt.method.empty()) a["method"] = attempt.method;
			if (!attempt.message.empty()) a["message"] = attempt.message;
			entry["attempts"].push_back(std::move(a));
		}
		if (county_run.model.level == ModelLevel::NAIVE) {
			entry["naive_mean"] = county_run.model.naive_mean;
		} else {
			entry["fit"] = nlohmann::ordered_json::parse(to_json(*county_run.model.fit));
		}
		j[county_run.county][std::to_string(county_run.horizon)] = std::move(entry);
	}
	return j.dump(2);
}

std::string design_csv(const DesignMatrix& design) {
	std::ostringstream out;
	out << "row,target";
	for (const auto& name : design.columns) out << ',' << csv_escape(name);
	out << '\n';
	for (Eigen::Index r = 0; r < design.rows(); ++r) {
		out << r << ',' << format_double(design.target.size() > r ? design.target(r) : 0.0);
		for (Eigen::Index c = 0; c < design.cols(); ++c) out << ',' << format_double(design.values(r, c));
		out << '\n';
	}
	return out.str();
}

int cmd_forecast(const CommonFlags& flags, bool dump_design) {
	const RunConfig config = resolve_config(flags);
	const fs::path dir = prepare_out_dir(config);

	const PanelDataset panel = load_input(config);
	auto [cleaned, cleaning_report] = clean_input(panel, config);
	const SelectionReport selection = selection_for(cleaned, config);

	if (dump_design) {
		const auto lags = lag_config_for(config.pipeline_config(), selection);
		std::vector<std::string> weather;
		for (const auto& name : selection.kept) {
			if (cleaned.feature_index(name) >= 0) weather.push_back(name);
		}
		for (const auto& county : cleaned.counties()) {
			const DesignMatrix design = build_design_matrix(cleaned, county, weather, lags);
			write_text(dir / ("design_" + county + ".csv"), design_csv(design));
		}
	}

	const PipelineRun run = run_all(cleaned, selection, config.pipeline_config(), config.horizons);
	write_text(dir / "forecasts.csv", forecast_csv(run));
	write_text(dir / "statewide.csv", statewide_csv(run));
	write_text(dir / "model_audit.json", audit_json(run));
	std::cout << "forecast: " << run.runs.size() << " county-horizon fits, artifacts in " << dir.string()
	          << "\n";
	return 0;
}

int cmd_backtest(const CommonFlags& flags, bool plots) {
	const RunConfig config = resolve_config(flags);
	if (config.backtest_cutoffs.empty()) {
		throw std::runtime_error("config: backtest.cutoffs must name at least one timestamp");
	}
	const fs::path dir = prepare_out_dir(config);

	const PanelDataset panel = load_input(config);
	const BacktestResult result = backtest(panel, config.backtest_cutoffs, config.horizons,
	                                       config.backtest_config());

	write_text(dir / "score_report.json", to_json(result));
	write_text(dir / "score_table.txt", render_score_table(result.entries));

	if (plots) {
		std::size_t cutoff_index = 0;
		std::map<EpochHour, std::size_t> cutoff_ids;
		for (const auto& curve : result.curves) {
			if (!cutoff_ids.count(curve.cutoff)) cutoff_ids[curve.cutoff] = cutoff_index++;
			const std::size_t cid = cutoff_ids[curve.cutoff];
			std::string name = curve.county + "_" + std::to_string(curve.horizon);
			if (config.backtest_cutoffs.size() > 1) name += "_c" + std::to_string(cid);
			const std::string title = curve.county + " " + std::to_string(curve.horizon) + "h from " +
			                          format_hour_utc(curve.cutoff);
			write_text(dir / (name + ".svg"), render_forecast_svg(title, curve.actual, curve.forecast));
		}
	}
	std::cout << "backtest: " << result.entries.size() << " score rows, artifacts in " << dir.string() << "\n";
	return 0;
}

int cmd_simulate(const CommonFlags& flags) {
	const RunConfig config = resolve_config(flags);
	const fs::path dir = prepare_out_dir(config);
	const PanelDataset panel = gen_panel(config.simulate);
	write_panel_csv(panel, (dir / "synthetic_panel.csv").string(), config.schema);
	std::cout << "simulate: " << panel.n_counties() << " counties x " << panel.n_hours()
	          << " hours, artifacts in " << dir.string() << "\n";
	return 0;
}

} // namespace

int run(const std::vector<std::string>& args) {
	CLI::App app{"gridcast - county-level power outage forecasting"};
	app.require_subcommand(1);

	CommonFlags clean_flags, select_flags, forecast_flags, backtest_flags, simulate_flags;
	std::vector<std::string> repair_timestamps;
	bool plots = false;
	bool dump_design = false;

	auto* clean = app.add_subcommand("clean", "run the Stage-1 cleaning chain");
	add_common_flags(clean, clean_flags);
	clean->add_option("--timestamps", repair_timestamps,
	                  "repair exactly these timestamps instead of detecting (ISO-8601)");

	auto* select = app.add_subcommand("select", "run the Stage-2 feature selection");
	add_common_flags(select, select_flags);

	auto* forecast = app.add_subcommand("forecast", "fit per-county models and forecast");
	add_common_flags(forecast, forecast_flags);
	forecast->add_flag("--dump-design", dump_design, "write per-county design matrices as CSV");

	auto* backtest_cmd = app.add_subcommand("backtest", "train-before-cutoff evaluation");
	add_common_flags(backtest_cmd, backtest_flags);
	backtest_cmd->add_flag("--plots", plots, "write per-county forecast-vs-actual SVG plots");

	auto* simulate = app.add_subcommand("simulate", "generate a synthetic panel CSV");
	add_common_flags(simulate, simulate_flags);

	std::vector<std::string> argv_storage = args;
	std::vector<const char*> argv;
	argv.push_back("gridcast");
	for (const auto& a : argv_storage) argv.push_back(a.c_str());

	try {
		app.parse(static_cast<int>(argv.size()), argv.data());
	} catch (const CLI::ParseError& e) {
		return app.exit(e);
	}

	try {
		if (clean->parsed()) return cmd_clean(clean_flags, repair_timestamps);
		if (select->parsed()) return cmd_select(select_flags);
		if (forecast->parsed()) return cmd_forecast(forecast_flags, dump_design);
		if (backtest_cmd->parsed()) return cmd_backtest(backtest_flags, plots);
		if (simulate->parsed()) return cmd_simulate(simulate_flags);
	} catch (const std::exception& e) {
		std::cerr << "error: " << e.what() << "\n";
		return 1;
	}
	return 1;
}

} // namespace gridcast::cli
