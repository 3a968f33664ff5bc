#include "gridcast/config.hpp"

#include <charconv>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>
#include <variant>

namespace gridcast {

namespace {

struct TomlValue {
	std::variant<std::int64_t, double, bool, std::string, std::vector<TomlValue>> data;
};

using TomlMap = std::map<std::string, TomlValue>;

[[noreturn]] void fail(const std::string& origin, std::size_t line, const std::string& message) {
	throw std::runtime_error(origin + ":" + std::to_string(line) + ": " + message);
}

std::string_view trim(std::string_view s) {
	while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
	while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
	return s;
}

// Strips a trailing comment outside of string literals.
std::string_view strip_comment(std::string_view s) {
	bool in_string = false;
	for (std::size_t i = 0; i < s.size(); ++i) {
		if (s[i] == '"') in_string = !in_string;
		if (s[i] == '#' && !in_string) return s.substr(0, i);
	}
	return s;
}

TomlValue parse_scalar(std::string_view text, const std::string& origin, std::size_t line);

TomlValue parse_value(std::string_view text, const std::string& origin, std::size_t line) {
	text = trim(text);
	if (text.empty()) fail(origin, line, "missing value");
	if (text.front() == '[') {
		if (text.back() != ']') fail(origin, line, "unterminated array");
		std::vector<TomlValue> items;
		std::string_view body = text.substr(1, text.size() - 2);
		std::size_t depth = 0;
		bool in_string = false;
		std::size_t start = 0;
		for (std::size_t i = 0; i <= body.size(); ++i) {
			const bool at_end = i == body.size();
			const char c = at_end ? ',' : body[i];
			if (!at_end && c == '"') in_string = !in_string;
			if (in_string) continue;
			if (c == '[') ++depth;
			if (c == ']') --depth;
			if (c == ',' && depth == 0) {
				const auto piece = trim(body.substr(start, i - start));
				if (!piece.empty()) items.push_back(parse_value(piece, origin, line));
				start = i + 1;
			}
		}
		return TomlValue{std::move(items)};
	}
	return parse_scalar(text, origin, line);
}

TomlValue parse_scalar(std::string_view text, const std::string& origin, std::size_t line) {
	if (text.front() == '"') {
		if (text.size() < 2 || text.back() != '"') fail(origin, line, "unterminated string");
		std::string out;
		for (std::size_t i = 1; i + 1 < text.size(); ++i) {
			if (text[i] == '\\' && i + 2 < text.size()) {
				++i;
				switch (text[i]) {
				case 'n':
					out.push_back('\n');
					break;
				case 't':
					out.push_back('\t');
					break;
				case '"':
					out.push_back('"');
					break;
				case '\\':
					out.push_back('\\');
					break;
				default:
					fail(origin, line, "unsupported escape sequence");
				}
			} else {
				out.push_back(text[i]);
			}
		}
		return TomlValue{std::move(out)};
	}
	if (text == "true") return TomlValue{true};
	if (text == "false") return TomlValue{false};

	const std::string buffer(text);
	// Integer first; fall through to double on any non-integer syntax.
	{
		std::int64_t v = 0;
		const auto res = std::from_chars(buffer.data(), buffer.data() + buffer.size(), v);
		if (res.ec == std::errc{} && res.ptr == buffer.data() + buffer.size()) return TomlValue{v};
	}
	{
		double v = 0.0;
		const auto res = std::from_chars(buffer.data(), buffer.data() + buffer.size(), v);
		if (res.ec == std::errc{} && res.ptr == buffer.data() + buffer.size()) return TomlValue{v};
	}
	fail(origin, line, "cannot parse value '" + buffer + "'");
}

// Flattens sections to "section.key" entries.
TomlMap parse_toml(const std::string& text, const std::string& origin) {
	TomlMap map;
	std::istringstream in(text);
	std::string raw;
	std::string section;
	std::size_t line_no = 0;
	while (std::getline(in, raw)) {
		++line_no;
		const auto line = trim(strip_comment(raw));
		if (line.empty()) continue;
		if (line.front() == '[') {
			if (line.back() != ']') fail(origin, line_no, "unterminated section header");
			section = std::string(trim(line.substr(1, line.size() - 2)));
			if (section.empty()) fail(origin, line_no, "empty section name");
			continue;
		}
		const auto eq = line.find('=');
		if (eq == std::string_view::npos) fail(origin, line_no, "expected key = value");
		const auto key = trim(line.substr(0, eq));
		if (key.empty()) fail(origin, line_no, "empty key");
		const std::string full_key = section.empty() ? std::string(key) : section + "." + std::string(key);
		if (map.count(full_key)) fail(origin, line_no, "duplicate key '" + full_key + "'");
		map[full_key] = parse_value(line.substr(eq + 1), origin, line_no);
	}
	return map;
}

class ConfigReader {
public:
	ConfigReader(TomlMap map, std::string origin) : map_(std::move(map)), origin_(std::move(origin)) {}

	template <typename T>
	void get(const std::string& key, T& out) {
		const auto it = map_.find(key);
		if (it == map_.end()) return;
		used_.insert(key);
		out = convert<T>(it->second, key);
	}

	void finish() const {
		for (const auto& [key, value] : map_) {
			if (!used_.count(key)) {
				throw std::runtime_error(origin_ + ": unknown configuration key '" + key + "'");
			}
		}
	}

private:
	template <typename T>
	T convert(const TomlValue& value, const std::string& key);

	TomlMap map_;
	std::string origin_;
	std::set<std::string> used_;
};

template <>
std::int64_t ConfigReader::convert<std::int64_t>(const TomlValue& value, const std::string& key) {
	if (const auto* v = std::get_if<std::int64_t>(&value.data)) return *v;
	throw std::runtime_error(origin_ + ": key '" + key + "' must be an integer");
}

template <>
int ConfigReader::convert<int>(const TomlValue& value, const std::string& key) {
	return static_cast<int>(convert<std::int64_t>(value, key));
}

template <>
std::size_t ConfigReader::convert<std::size_t>(const TomlValue& value, const std::string& key) {
	const auto v = convert<std::int64_t>(value, key);
	if (v < 0) throw std::runtime_error(origin_ + ": key '" + key + "' must be non-negative");
	return static_cast<std::size_t>(v);
}

template <>
double ConfigReader::convert<double>(const TomlValue& value, const std::string& key) {
	if (const auto* v = std::get_if<double>(&value.data)) return *v;
	if (const auto* v = std::get_if<std::int64_t>(&value.data)) return static_cast<double>(*v);
	throw std::runtime_error(origin_ + ": key '" + key + "' must be a number");
}

template <>
bool ConfigReader::convert<bool>(const TomlValue& value, const std::string& key) {
	if (const auto* v = std::get_if<bool>(&value.data)) return *v;
	throw std::runtime_error(origin_ + ": key '" + key + "' must be true or false");
}

template <>
std::string ConfigReader::convert<std::string>(const TomlValue& value, const std::string& key) {
	if (const auto* v = std::get_if<std::string>(&value.data)) return *v;
	throw std::runtime_error(origin_ + ": key '" + key + "' must be a string");
}

template <>
std::vector<int> ConfigReader::convert<std::vector<int>>(const TomlValue& value, const std::string& key) {
	const auto* items = std::get_if<std::vector<TomlValue>>(&value.data);
	if (items == nullptr) throw std::runtime_error(origin_ + ": key '" + key + "' must be an array");
	std::vector<int> out;
	for (const auto& item : *items) out.push_back(convert<int>(item, key));
	return out;
}

template <>
std::vector<std::size_t> ConfigReader::convert<std::vector<std::size_t>>(const TomlValue& value,
                                                                         const std::string& key) {
	const auto* items = std::get_if<std::vector<TomlValue>>(&value.data);
	if (items == nullptr) throw std::runtime_error(origin_ + ": key '" + key + "' must be an array");
	std::vector<std::size_t> out;
	for (const auto& item : *items) out.push_back(convert<std::size_t>(item, key));
	return out;
}

template <>
std::vector<double> ConfigReader::convert<std::vector<double>>(const TomlValue& value,
                                                               const std::string& key) {
	const auto* items = std::get_if<std::vector<TomlValue>>(&value.data);
	if (items == nullptr) throw std::runtime_error(origin_ + ": key '" + key + "' must be an array");
	std::vector<double> out;
	for (const auto& item : *items) out.push_back(convert<double>(item, key));
	return out;
}

template <>
std::vector<std::string> ConfigReader::convert<std::vector<std::string>>(const TomlValue& value,
                                                                         const std::string& key) {
	const auto* items = std::get_if<std::vector<TomlValue>>(&value.data);
	if (items == nullptr) throw std::runtime_error(origin_ + ": key '" + key + "' must be an array");
	std::vector<std::string> out;
	for (const auto& item : *items) out.push_back(convert<std::string>(item, key));
	return out;
}

ColumnSelector selector_from_string(const std::string& text) {
	if (text == "tracked") return ColumnSelector::tracked();
	if (text == "outages") return ColumnSelector::outage();
	const std::string prefix = "weather:";
	if (text.rfind(prefix, 0) == 0) return ColumnSelector::weather(text.substr(prefix.size()));
	throw std::runtime_error("config: impute selector must be 'tracked', 'outages', or 'weather:<name>', got '" +
	                         text + "'");
}

} // namespace

void RunConfig::validate() const {
	if (horizons.empty()) throw std::runtime_error("config: horizons must be non-empty");
	for (const int h : horizons) {
		if (h < 1) throw std::runtime_error("config: horizons must be positive");
	}
	order.validate();
	if (optim.max_iter < 1) throw std::runtime_error("config: optimizer max_iter must be >= 1");
	if (!(optim.tol > 0.0)) throw std::runtime_error("config: optimizer tol must be positive");
	if (!(optim.gradient_step > 0.0)) throw std::runtime_error("config: gradient_step must be positive");
	if (!(selection.prune_threshold > 0.0) || selection.prune_threshold > 1.0) {
		throw std::runtime_error("config: prune_threshold must lie in (0, 1]");
	}
	if (selection.k < 1) throw std::runtime_error("config: selection k must be >= 1");
	if (jobs < 0) throw std::runtime_error("config: jobs must be non-negative");
}

PipelineConfig RunConfig::pipeline_config() const {
	PipelineConfig out;
	out.order = order;
	out.optim = optim;
	out.outage_lags = outage_lags;
	out.tracked_lags = tracked_lags;
	out.weather_lags = weather_lags;
	out.weather_lag_features = weather_lag_features;
	out.naive_window = naive_window;
	out.aggregate = aggregate;
	out.jobs = jobs;
	return out;
}

BacktestConfig RunConfig::backtest_config() const {
	BacktestConfig out;
	out.cleaning = cleaning;
	out.selection = selection;
	out.pipeline = pipeline_config();
	return out;
}

RunConfig parse_run_config(const std::string& text, const std::string& origin) {
	ConfigReader reader(parse_toml(text, origin), origin);
	RunConfig config;

	reader.get("input.path", config.input);
	reader.get("input.timestamp", config.schema.timestamp);
	reader.get("input.county", config.schema.county);
	reader.get("input.outages", config.schema.outages);
	reader.get("input.tracked", config.schema.tracked);

	reader.get("model.p", config.order.p);
	reader.get("model.d", config.order.d);
	reader.get("model.q", config.order.q);
	reader.get("model.seasonal_p", config.order.seasonal.P);
	reader.get("model.seasonal_d", config.order.seasonal.D);
	reader.get("model.seasonal_q", config.order.seasonal.Q);
	reader.get("model.seasonal_s", config.order.seasonal.s);
	reader.get("model.horizons", config.horizons);

	reader.get("optimizer.max_iter", config.optim.max_iter);
	reader.get("optimizer.tol", config.optim.tol);
	reader.get("optimizer.gradient_step", config.optim.gradient_step);

	reader.get("selection.k", config.selection.k);
	reader.get("selection.pca_components", config.selection.pca_components);
	reader.get("selection.pca_picks", config.selection.pca_picks);
	reader.get("selection.prune_threshold", config.selection.prune_threshold);
	reader.get("selection.report", config.selection_report_path);

	reader.get("clean.name_patterns", config.cleaning.name_patterns);
	{
		std::vector<std::string> impute{"tracked"};
		reader.get("clean.impute", impute);
		config.cleaning.impute_columns.clear();
		for (const auto& entry : impute) {
			config.cleaning.impute_columns.push_back(selector_from_string(entry));
		}
	}
	{
		std::vector<std::string> stamps;
		reader.get("clean.repair_timestamps", stamps);
		if (!stamps.empty()) {
			std::vector<EpochHour> hours;
			for (const auto& s : stamps) hours.push_back(parse_hour_utc(s));
			config.cleaning.repair_timestamps = std::move(hours);
		}
	}

	reader.get("lags.outages", config.outage_lags);
	reader.get("lags.tracked", config.tracked_lags);
	reader.get("lags.weather", config.weather_lags);
	reader.get("lags.weather_features", config.weather_lag_features);

	{
		std::int64_t seed = static_cast<std::int64_t>(config.seed);
		reader.get("run.seed", seed);
		if (seed < 0) throw std::runtime_error(origin + ": run.seed must be non-negative");
		config.seed = static_cast<std::uint64_t>(seed);
	}
	reader.get("run.jobs", config.jobs);
	reader.get("run.out", config.out_dir);
	reader.get("run.naive_window", config.naive_window);
	reader.get("run.aggregate", config.aggregate);

	{
		std::vector<std::string> stamps;
		reader.get("backtest.cutoffs", stamps);
		for (const auto& s : stamps) config.backtest_cutoffs.push_back(parse_hour_utc(s));
	}

	reader.get("simulate.counties", config.simulate.counties);
	reader.get("simulate.hours", config.simulate.hours);
	reader.get("simulate.phi", config.simulate.phi);
	reader.get("simulate.theta", config.simulate.theta);
	reader.get("simulate.sigma2", config.simulate.sigma2);
	reader.get("simulate.beta", config.simulate.weather_beta);
	{
		std::int64_t seed = static_cast<std::int64_t>(config.simulate.seed);
		reader.get("simulate.seed", seed);
		if (seed < 0) throw std::runtime_error(origin + ": simulate.seed must be non-negative");
		config.simulate.seed = static_cast<std::uint64_t>(seed);
	}
	reader.get("simulate.diurnal_amplitude", config.simulate.diurnal_amplitude);
	reader.get("simulate.base_level", config.simulate.base_level);
	reader.get("simulate.tracked_scale", config.simulate.tracked_scale);
	reader.get("simulate.tracked_noise", config.simulate.tracked_noise);
	reader.get("simulate.tracked_missing_rate", config.simulate.tracked_missing_rate);
	reader.get("simulate.noise_features", config.simulate.noise_features);
	reader.get("simulate.zero_features", config.simulate.zero_features);
	reader.get("simulate.unknown_features", config.simulate.unknown_features);
	reader.get("simulate.zero_row_offsets", config.simulate.zero_row_offsets);
	{
		std::string start;
		reader.get("simulate.start", start);
		if (!start.empty()) config.simulate.start = parse_hour_utc(start);
	}

	// The config's seed doubles as the k-means seed unless one is given.
	config.selection.seed = config.seed;
	{
		std::int64_t seed = static_cast<std::int64_t>(config.selection.seed);
		reader.get("selection.seed", seed);
		if (seed < 0) throw std::runtime_error(origin + ": selection.seed must be non-negative");
		config.selection.seed = static_cast<std::uint64_t>(seed);
	}

	reader.finish();
	config.validate();
	return config;
}

RunConfig load_run_config(const std::string& path) {
	std::ifstream in(path, std::ios::binary);
	if (!in) throw std::runtime_error("cannot open config file: " + path);
	std::ostringstream buf;
	buf << in.rdbuf();
	return parse_run_config(buf.str(), path);
}

} // namespace gridcast
