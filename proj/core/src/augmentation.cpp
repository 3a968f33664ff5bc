#include "gridcast/augmentation.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace gridcast {

TemporalEmbedding temporal_embedding(int hour) {
	if (hour < 0 || hour > 23) {
		throw std::invalid_argument("temporal_embedding: hour " + std::to_string(hour) + " outside 0..23");
	}
	// Reduce to the first quadrant so multiples of 6 hours are exact.
	const int quadrant = hour / 6;
	const int rem = hour % 6;
	const double angle = std::numbers::pi * rem / 12.0;
	const double s = std::sin(angle);
	const double c = std::cos(angle);
	switch (quadrant) {
	case 0:
		return {s, c};
	case 1:
		return {c, -s};
	case 2:
		return {-s, -c};
	default:
		return {-c, s};
	}
}

void LagSpec::validate() const {
	if (lags.empty()) throw std::invalid_argument("lag spec: empty lag list");
	int prev = 0;
	for (const int lag : lags) {
		if (lag <= 0) throw std::invalid_argument("lag spec: lags must be positive");
		if (lag <= prev) throw std::invalid_argument("lag spec: lags must be strictly ascending");
		prev = lag;
	}
	if (source == Source::weather && feature.empty()) {
		throw std::invalid_argument("lag spec: weather lag needs a feature name");
	}
}

std::string LagSpec::source_label() const {
	switch (source) {
	case Source::outage:
		return "outages";
	case Source::tracked:
		return "tracked";
	case Source::weather:
		return feature;
	}
	return {};
}

std::ptrdiff_t DesignMatrix::column_index(const std::string& name) const {
	const auto it = std::find(columns.begin(), columns.end(), name);
	return it == columns.end() ? -1 : it - columns.begin();
}

Eigen::MatrixXd add_lags(const Eigen::VectorXd& series, const LagSpec& spec) {
	spec.validate();
	const int max_lag = spec.lags.back();
	if (series.size() <= max_lag) {
		throw std::invalid_argument("add_lags: series length " + std::to_string(series.size()) +
		                            " must exceed max lag " + std::to_string(max_lag));
	}
	Eigen::MatrixXd out =
	    Eigen::MatrixXd::Constant(series.size(), static_cast<Eigen::Index>(spec.lags.size()), missing_value());
	for (std::size_t k = 0; k < spec.lags.size(); ++k) {
		const int lag = spec.lags[k];
		out.col(static_cast<Eigen::Index>(k)).tail(series.size() - lag) = series.head(series.size() - lag);
	}
	return out;
}

std::vector<LagSpec> default_lag_config(const std::vector<std::string>& weather_lag_features) {
	std::vector<LagSpec> config;
	config.push_back({LagSpec::Source::outage, {}, {1, 24}});
	config.push_back({LagSpec::Source::tracked, {}, {1, 24}});
	for (const auto& name : weather_lag_features) {
		config.push_back({LagSpec::Source::weather, name, {1, 6}});
	}
	return config;
}

DesignMatrix build_design_matrix(const PanelDataset& panel, const std::string& county,
                                 const std::vector<std::string>& weather_features,
                                 const std::vector<LagSpec>& lag_config) {
	const auto county_idx = panel.county_index(county);
	if (county_idx < 0) throw std::invalid_argument("design matrix: unknown county '" + county + "'");
	const auto ci = static_cast<Eigen::Index>(county_idx);
	const auto n_hours = static_cast<Eigen::Index>(panel.n_hours());

	int max_lag = 0;
	for (const auto& spec : lag_config) {
		spec.validate();
		max_lag = std::max(max_lag, spec.lags.back());
	}
	if (n_hours <= max_lag) {
		throw std::invalid_argument("design matrix: series length " + std::to_string(n_hours) +
		                            " must exceed max lag " + std::to_string(max_lag));
	}
	if (weather_features.empty() && lag_config.empty()) {
		throw std::invalid_argument("design matrix: no columns configured");
	}

	DesignMatrix design;
	design.county = county;
	design.offset = static_cast<std::size_t>(max_lag);

	auto series_for = [&](LagSpec::Source source, const std::string& feature) -> Eigen::VectorXd {
		switch (source) {
		case LagSpec::Source::outage:
			return panel.outages().col(ci);
		case LagSpec::Source::tracked:
			return panel.tracked().col(ci);
		case LagSpec::Source::weather: {
			const auto f = panel.feature_index(feature);
			if (f < 0) throw std::invalid_argument("design matrix: unknown weather feature '" + feature + "'");
			return panel.weather(static_cast<std::size_t>(f)).col(ci);
		}
		}
		return {};
	};

	std::vector<Eigen::VectorXd> raw_columns;
	for (const auto& name : weather_features) {
		raw_columns.push_back(series_for(LagSpec::Source::weather, name));
		design.specs.push_back({ColumnSpec::Kind::weather, name, name, LagSpec::Source::weather, 0});
		design.columns.push_back(name);
	}

	Eigen::VectorXd sin_col(n_hours), cos_col(n_hours);
	for (Eigen::Index t = 0; t < n_hours; ++t) {
		const auto e = temporal_embedding(hour_of_day(panel.time().at(static_cast<std::size_t>(t))));
		sin_col(t) = e.sin_h;
		cos_col(t) = e.cos_h;
	}
	raw_columns.push_back(std::move(sin_col));
	design.specs.push_back({ColumnSpec::Kind::sin_hour, "sin_hour", {}, LagSpec::Source::weather, 0});
	design.columns.push_back("sin_hour");
	raw_columns.push_back(std::move(cos_col));
	design.specs.push_back({ColumnSpec::Kind::cos_hour, "cos_hour", {}, LagSpec::Source::weather, 0});
	design.columns.push_back("cos_hour");

	for (const auto& spec : lag_config) {
		const Eigen::VectorXd base = series_for(spec.source, spec.feature);
		const Eigen::MatrixXd lagged = add_lags(base, spec);
		for (std::size_t k = 0; k < spec.lags.size(); ++k) {
			raw_columns.push_back(lagged.col(static_cast<Eigen::Index>(k)));
			const std::string name = spec.source_label() + "_lag" + std::to_string(spec.lags[k]);
			design.specs.push_back({ColumnSpec::Kind::lag, name, spec.feature, spec.source, spec.lags[k]});
			design.columns.push_back(name);
		}
	}

	const Eigen::Index rows = n_hours - max_lag;
	design.values.resize(rows, static_cast<Eigen::Index>(raw_columns.size()));
	for (std::size_t j = 0; j < raw_columns.size(); ++j) {
		design.values.col(static_cast<Eigen::Index>(j)) = raw_columns[j].tail(rows);
	}
	design.target = panel.outages().col(ci).tail(rows);

	if (!design.values.allFinite() || !design.target.allFinite()) {
		throw std::invalid_argument("design matrix: county '" + county +
		                            "' still has missing cells; clean the panel first");
	}
	return design;
}

} // namespace gridcast
