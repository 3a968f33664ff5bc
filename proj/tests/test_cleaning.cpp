#include <doctest.h>

#include <gridcast/cleaning.hpp>

#include "support/test_util.hpp"

using namespace gridcast;
using gridcast::testing::make_panel;

TEST_SUITE_BEGIN("cleaning");

TEST_CASE("drop_zero_variance removes exactly the constant features") {
	auto panel = make_panel(3, {"A"}, 3);
	for (std::size_t i = 0; i < 3; ++i) {
		panel.weather(0)(i, 0) = 5.0;                        // constant -> dropped
		panel.weather(1)(i, 0) = i < 2 ? 1.0 : 2.0;          // [1,1,2] -> kept
		panel.weather(2)(i, 0) = 0.0;                        // constant zero -> dropped
		panel.outages()(i, 0) = 0.0;
		panel.tracked()(i, 0) = 0.0;
	}
	const auto [cleaned, report] = drop_zero_variance(panel);
	CHECK(cleaned.n_features() == 1);
	CHECK(cleaned.features()[0].name == "w1");
	CHECK(report.dropped_zero_variance == std::vector<std::string>{"w0", "w2"});
}

TEST_CASE("drop_zero_variance mirrors the 109 -> 94 feature count") {
	// 109 features, 15 planted all-zero: the survivors number 94.
	auto panel = make_panel(8, {"A", "B"}, 109);
	for (std::size_t f = 0; f < 109; ++f) {
		for (std::size_t i = 0; i < 8; ++i) {
			for (std::size_t c = 0; c < 2; ++c) {
				const bool zero = f >= 94;
				panel.weather(f)(i, c) = zero ? 0.0 : static_cast<double>((f + 3) * (i + 1) + c);
			}
		}
	}
	const auto [cleaned, report] = drop_zero_variance(panel);
	CHECK(cleaned.n_features() == 94);
	CHECK(report.dropped_zero_variance.size() == 15);
}

TEST_CASE("drop_zero_variance fails when nothing survives") {
	auto panel = make_panel(3, {"A"}, 1);
	for (std::size_t i = 0; i < 3; ++i) panel.weather(0)(i, 0) = 7.0;
	CHECK_THROWS_AS(drop_zero_variance(panel), std::runtime_error);
}

TEST_CASE("drop_by_name matches prefixes and exact names") {
	std::vector<FeatureMeta> features{{"unknown", FeatureMeta::Kind::weather, {}},
	                                  {"unknown_1", FeatureMeta::Kind::weather, {}},
	                                  {"t2m", FeatureMeta::Kind::weather, {}}};
	PanelDataset panel(TimeIndex{0, 2}, {"A"}, features);

	SUBCASE("prefix pattern keeps only t2m") {
		const auto [cleaned, report] = drop_by_name(panel, {"unknown*"});
		CHECK(cleaned.n_features() == 1);
		CHECK(cleaned.features()[0].name == "t2m");
		CHECK(report.dropped_by_name == std::vector<std::string>{"unknown", "unknown_1"});
	}
	SUBCASE("no match is a recorded no-op") {
		const auto [cleaned, report] = drop_by_name(panel, {"absent"});
		CHECK(cleaned.n_features() == 3);
		CHECK(report.dropped_by_name.empty());
	}
	SUBCASE("exact pattern removes t2m") {
		const auto [cleaned, report] = drop_by_name(panel, {"t2m"});
		CHECK(cleaned.n_features() == 2);
		CHECK(report.dropped_by_name == std::vector<std::string>{"t2m"});
	}
}

TEST_CASE("impute_adjacent_mean fills interior, boundary, and long gaps") {
	SUBCASE("interior single gap takes the neighbor mean") {
		auto panel = make_panel(3, {"A"}, 1);
		panel.tracked()(0, 0) = 10.0;
		panel.tracked()(1, 0) = missing_value();
		panel.tracked()(2, 0) = 20.0;
		const auto [fixed, report] = impute_adjacent_mean(panel, ColumnSelector::tracked());
		CHECK(fixed.tracked()(1, 0) == 15.0);
		REQUIRE(report.imputed_cells.size() == 1);
		CHECK(report.imputed_cells[0].column == "tracked");
		CHECK(report.imputed_cells[0].timestamp == panel.time().at(1));
	}
	SUBCASE("boundary gap copies the single neighbor") {
		auto panel = make_panel(3, {"A"}, 1);
		panel.tracked()(0, 0) = missing_value();
		panel.tracked()(1, 0) = 7.0;
		panel.tracked()(2, 0) = 9.0;
		const auto [fixed, report] = impute_adjacent_mean(panel, ColumnSelector::tracked());
		CHECK(fixed.tracked()(0, 0) == 7.0);
	}
	SUBCASE("runs interpolate linearly between the bracketing values") {
		// Independent oracle: the gap [0, _, _, 30] lies on the line 0 + 10*t.
		auto panel = make_panel(4, {"A"}, 1);
		panel.tracked()(0, 0) = 0.0;
		panel.tracked()(1, 0) = missing_value();
		panel.tracked()(2, 0) = missing_value();
		panel.tracked()(3, 0) = 30.0;
		const auto [fixed, report] = impute_adjacent_mean(panel, ColumnSelector::tracked());
		CHECK(fixed.tracked()(1, 0) == doctest::Approx(10.0));
		CHECK(fixed.tracked()(2, 0) == doctest::Approx(20.0));
		CHECK(report.imputed_cells.size() == 2);
	}
	SUBCASE("an all-missing county column is an error naming the county") {
		auto panel = make_panel(3, {"A", "B"}, 1);
		panel.tracked().col(0).setConstant(1.0);
		CHECK_THROWS_WITH_AS(impute_adjacent_mean(panel, ColumnSelector::tracked()),
		                     doctest::Contains("B"), std::runtime_error);
	}
	SUBCASE("present cells never change") {
		auto panel = make_panel(5, {"A"}, 1);
		for (std::size_t i = 0; i < 5; ++i) panel.tracked()(i, 0) = static_cast<double>(i * i);
		panel.tracked()(2, 0) = missing_value();
		const auto [fixed, report] = impute_adjacent_mean(panel, ColumnSelector::tracked());
		for (std::size_t i = 0; i < 5; ++i) {
			if (i == 2) continue;
			CHECK(fixed.tracked()(i, 0) == panel.tracked()(i, 0));
		}
	}
}

TEST_CASE("repair_zero_rows repairs all-zero weather timestamps") {
	SUBCASE("interior all-zero row becomes the neighbor average") {
		auto panel = make_panel(3, {"A"}, 2);
		panel.weather(0)(0, 0) = 3.0;
		panel.weather(1)(0, 0) = 4.0;
		panel.weather(0)(1, 0) = 0.0;
		panel.weather(1)(1, 0) = 0.0;
		panel.weather(0)(2, 0) = 5.0;
		panel.weather(1)(2, 0) = 6.0;
		const auto [fixed, report] = repair_zero_rows(panel);
		CHECK(fixed.weather(0)(1, 0) == 4.0);
		CHECK(fixed.weather(1)(1, 0) == 5.0);
		CHECK(report.repaired_timestamps == std::vector<EpochHour>{panel.time().at(1)});
	}
	SUBCASE("no all-zero timestamp leaves the panel unchanged") {
		auto panel = make_panel(3, {"A"}, 2);
		for (std::size_t i = 0; i < 3; ++i) {
			panel.weather(0)(i, 0) = 1.0 + i;
			panel.weather(1)(i, 0) = 2.0 + i;
		}
		const auto [fixed, report] = repair_zero_rows(panel);
		CHECK(report.repaired_timestamps.empty());
		CHECK(fixed.weather(0)(1, 0) == 2.0);
	}
	SUBCASE("a partially zero timestamp is not repaired") {
		auto panel = make_panel(3, {"A"}, 2);
		for (std::size_t i = 0; i < 3; ++i) {
			panel.weather(0)(i, 0) = 1.0 + i;
			panel.weather(1)(i, 0) = 2.0 + i;
		}
		panel.weather(0)(1, 0) = 0.0; // only one of two features
		const auto [fixed, report] = repair_zero_rows(panel);
		CHECK(report.repaired_timestamps.empty());
		CHECK(fixed.weather(0)(1, 0) == 0.0);
	}
	SUBCASE("consecutive anomalies at the boundary have no anchor") {
		auto panel = make_panel(4, {"A"}, 1);
		panel.weather(0)(0, 0) = 0.0;
		panel.weather(0)(1, 0) = 0.0;
		panel.weather(0)(2, 0) = 3.0;
		panel.weather(0)(3, 0) = 4.0;
		CHECK_THROWS_AS(repair_zero_rows(panel), std::runtime_error);
	}
	SUBCASE("an explicit timestamp list bypasses detection") {
		auto panel = make_panel(3, {"A"}, 1);
		panel.weather(0)(0, 0) = 2.0;
		panel.weather(0)(1, 0) = 9.0; // not all-zero, but listed
		panel.weather(0)(2, 0) = 4.0;
		const auto [fixed, report] = repair_zero_rows(panel, {panel.time().at(1)});
		CHECK(fixed.weather(0)(1, 0) == 3.0);
		CHECK(report.repaired_timestamps.size() == 1);
	}
}

TEST_CASE("the Stage-1 chain is idempotent") {
	auto panel = make_panel(48, {"A", "B"}, 6);
	std::mt19937_64 rng(11);
	std::uniform_real_distribution<double> value(1.0, 9.0);
	for (std::size_t i = 0; i < 48; ++i) {
		for (std::size_t c = 0; c < 2; ++c) {
			panel.outages()(i, c) = std::floor(value(rng));
			panel.tracked()(i, c) = i % 11 == 3 ? missing_value() : std::floor(value(rng));
			panel.weather(0)(i, c) = 0.0;       // zero-variance
			panel.weather(1)(i, c) = value(rng);
			panel.weather(2)(i, c) = value(rng);
			panel.weather(3)(i, c) = 4.2;       // constant
			panel.weather(4)(i, c) = value(rng);
			panel.weather(5)(i, c) = value(rng);
		}
	}
	// One anomalous timestamp: every feature that still varies reads zero
	// (w3 stays at its constant value and is dropped in the first pass).
	for (const std::size_t f : {0u, 1u, 2u, 4u, 5u}) panel.weather(f).row(20).setZero();

	CleaningConfig config;
	const auto [once, r1] = clean_stage1(panel, config);
	const auto [twice, r2] = clean_stage1(once, config);

	CHECK(r1.dropped_zero_variance == std::vector<std::string>{"w0", "w3"});
	CHECK(r1.repaired_timestamps.size() == 1);
	CHECK(r2.dropped_zero_variance.empty());
	CHECK(r2.imputed_cells.empty());
	CHECK(r2.repaired_timestamps.empty());

	REQUIRE(twice.n_features() == once.n_features());
	for (std::size_t f = 0; f < once.n_features(); ++f) {
		CHECK(twice.weather(f) == once.weather(f));
	}
	CHECK(twice.tracked() == once.tracked());
	CHECK(twice.outages() == once.outages());
}

TEST_CASE("cleaning reports serialize to JSON") {
	CleaningReport report;
	report.dropped_zero_variance = {"aod", "tp"};
	report.imputed_cells.push_back({"A", 466344, "tracked"});
	report.repaired_timestamps.push_back(466345);
	const std::string json = to_json(report);
	CHECK(json.find("\"aod\"") != std::string::npos);
	CHECK(json.find("2023-03-15T00:00:00Z") != std::string::npos);
	CHECK(json.find("2023-03-15T01:00:00Z") != std::string::npos);
}

TEST_SUITE_END();
