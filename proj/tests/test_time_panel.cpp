#include <doctest.h>

#include <gridcast/csv.hpp>
#include <gridcast/panel.hpp>
#include <gridcast/time_index.hpp>

#include "support/test_util.hpp"

using namespace gridcast;
using gridcast::testing::TempDir;
using gridcast::testing::write_file;

TEST_SUITE_BEGIN("panel");

TEST_CASE("parse_hour_utc handles zones and rejects sub-hour instants") {
	CHECK(parse_hour_utc("1970-01-01T00:00:00Z") == 0);
	CHECK(parse_hour_utc("1970-01-01T01:00:00Z") == 1);
	CHECK(parse_hour_utc("1969-12-31T23:00:00Z") == -1);
	CHECK(parse_hour_utc("2023-04-30T23:00:00Z") == parse_hour_utc("2023-05-01 00:00:00+01:00"));
	CHECK(parse_hour_utc("2023-04-30T23:00") == parse_hour_utc("2023-04-30T23:00:00Z"));
	CHECK_THROWS_AS(parse_hour_utc("2023-04-30T23:30:00Z"), std::invalid_argument);
	CHECK_THROWS_AS(parse_hour_utc("2023-04-30T10:00:00+05:30"), std::invalid_argument);
	CHECK_THROWS_AS(parse_hour_utc("2023-02-29T00:00:00Z"), std::invalid_argument);
	CHECK_THROWS_AS(parse_hour_utc("garbage"), std::invalid_argument);
}

TEST_CASE("format_hour_utc inverts parse_hour_utc") {
	for (const char* text : {"2023-04-30T23:00:00Z", "2024-02-29T05:00:00Z", "1999-12-31T23:00:00Z"}) {
		CHECK(format_hour_utc(parse_hour_utc(text)) == text);
	}
	// The synthetic panel's default start.
	CHECK(format_hour_utc(466344) == "2023-03-15T00:00:00Z");
}

TEST_CASE("TimeIndex arithmetic is bijective over the grid") {
	const TimeIndex time{parse_hour_utc("2023-04-01T00:00:00Z"), 100};
	for (std::size_t i = 0; i < time.length; ++i) {
		CHECK(time.index_of(time.at(i)) == static_cast<std::ptrdiff_t>(i));
	}
	CHECK(time.index_of(time.start - 1) == -1);
	CHECK(time.index_of(time.last() + 1) == -1);
}

namespace {

const char* kSmallCsv =
    "timestamp,county,outages,tracked,w0,w1\n"
    "2023-04-01T00:00:00Z,A,1,10,0.5,2\n"
    "2023-04-01T01:00:00Z,A,2,11,0.6,3\n"
    "2023-04-01T02:00:00Z,A,3,12,0.7,4\n"
    "2023-04-01T00:00:00Z,B,0,20,1.5,5\n"
    "2023-04-01T01:00:00Z,B,1,21,1.6,6\n"
    "2023-04-01T02:00:00Z,B,2,22,1.7,7\n";

} // namespace

TEST_CASE("load_panel_csv keeps dimensions and source values") {
	TempDir dir("panel");
	write_file(dir.file("p.csv"), kSmallCsv);
	const PanelDataset panel = load_panel_csv(dir.file("p.csv"), CsvSchema{});
	CHECK(panel.n_counties() == 2);
	CHECK(panel.time().length == 3);
	CHECK(panel.n_features() == 2);
	const auto a = panel.county_index("A");
	CHECK(panel.outages()(2, a) == 3.0);
	CHECK(panel.tracked()(0, a) == 10.0);
	CHECK(panel.weather(1)(1, static_cast<Eigen::Index>(panel.county_index("B"))) == 6.0);
}

TEST_CASE("load_panel_csv reports the row of a non-numeric value") {
	TempDir dir("panel");
	write_file(dir.file("p.csv"),
	           "timestamp,county,outages,tracked,w0\n"
	           "2023-04-01T00:00:00Z,A,1,10,0.5\n"
	           "2023-04-01T01:00:00Z,A,abc,11,0.6\n");
	CHECK_THROWS_WITH_AS(load_panel_csv(dir.file("p.csv"), CsvSchema{}),
	                     doctest::Contains("row 3"), std::runtime_error);
}

TEST_CASE("load_panel_csv records empty numeric fields as missing") {
	TempDir dir("panel");
	write_file(dir.file("p.csv"),
	           "timestamp,county,outages,tracked,w0\n"
	           "2023-04-01T00:00:00Z,A,1,,0.5\n"
	           "2023-04-01T01:00:00Z,A,2,11,0.6\n");
	const PanelDataset panel = load_panel_csv(dir.file("p.csv"), CsvSchema{});
	CHECK(is_missing(panel.tracked()(0, 0)));
	CHECK(panel.tracked()(1, 0) == 11.0);
}

TEST_CASE("load_panel_csv requires the mapped columns") {
	TempDir dir("panel");
	write_file(dir.file("p.csv"), "timestamp,county,outages\n2023-04-01T00:00:00Z,A,1\n");
	CHECK_THROWS_WITH_AS(load_panel_csv(dir.file("p.csv"), CsvSchema{}), doctest::Contains("tracked"),
	                     std::runtime_error);
}

TEST_CASE("validate_grid reports gaps and duplicates") {
	TempDir dir("panel");

	SUBCASE("gap-free panel yields an empty report") {
		write_file(dir.file("p.csv"), kSmallCsv);
		const auto report = validate_grid(load_panel_csv(dir.file("p.csv"), CsvSchema{}));
		CHECK(report.clean());
	}

	SUBCASE("a missing hour for one county is one gap of length 1") {
		write_file(dir.file("p.csv"),
		           "timestamp,county,outages,tracked,w0\n"
		           "2023-04-01T00:00:00Z,A,1,1,0.5\n"
		           "2023-04-01T01:00:00Z,A,1,1,0.5\n"
		           "2023-04-01T02:00:00Z,A,1,1,0.5\n"
		           "2023-04-01T00:00:00Z,B,1,1,0.5\n"
		           "2023-04-01T02:00:00Z,B,1,1,0.5\n");
		const auto report = validate_grid(load_panel_csv(dir.file("p.csv"), CsvSchema{}));
		REQUIRE(report.gaps.size() == 1);
		CHECK(report.gaps[0].county == "B");
		CHECK(report.gaps[0].length == 1);
		CHECK(report.gaps[0].start == parse_hour_utc("2023-04-01T01:00:00Z"));
		CHECK(report.duplicates.empty());
	}

	SUBCASE("two rows for one cell are one duplicate") {
		write_file(dir.file("p.csv"),
		           "timestamp,county,outages,tracked,w0\n"
		           "2023-04-01T00:00:00Z,A,1,1,0.5\n"
		           "2023-04-01T01:00:00Z,A,2,1,0.5\n"
		           "2023-04-01T01:00:00Z,A,9,9,9.9\n");
		const PanelDataset panel = load_panel_csv(dir.file("p.csv"), CsvSchema{});
		const auto report = validate_grid(panel);
		REQUIRE(report.duplicates.size() == 1);
		CHECK(report.duplicates[0].county == "A");
		CHECK(report.duplicates[0].timestamp == parse_hour_utc("2023-04-01T01:00:00Z"));
		// First occurrence wins.
		CHECK(panel.outages()(1, 0) == 2.0);
	}
}

TEST_CASE("split_at covers [start, cutoff) and [cutoff, end]") {
	const auto panel = gridcast::testing::make_panel(100, {"A", "B"}, 1);
	const EpochHour cutoff = panel.time().at(76);
	const auto [train, test] = split_at(panel, cutoff);
	CHECK(train.time().length == 76);
	CHECK(test.time().length == 24);
	CHECK(train.time().start == panel.time().start);
	CHECK(test.time().start == cutoff);

	CHECK_THROWS_AS(split_at(panel, panel.time().start), std::invalid_argument);
	CHECK_THROWS_AS(split_at(panel, panel.time().last() + 1), std::invalid_argument);
}

TEST_CASE("split then concat is lossless for every cell") {
	auto panel = gridcast::testing::make_panel(50, {"A", "B"}, 2);
	std::mt19937_64 rng(7);
	std::uniform_real_distribution<double> value(0.0, 100.0);
	for (std::size_t i = 0; i < 50; ++i) {
		for (std::size_t c = 0; c < 2; ++c) {
			panel.outages()(i, c) = std::floor(value(rng));
			panel.tracked()(i, c) = std::floor(value(rng));
			panel.weather(0)(i, c) = value(rng);
			panel.weather(1)(i, c) = i == 7 ? missing_value() : value(rng);
		}
	}
	const auto [a, b] = split_at(panel, panel.time().at(20));
	const PanelDataset joined = concat(a, b);
	CHECK(joined.time() == panel.time());
	for (std::size_t i = 0; i < 50; ++i) {
		for (std::size_t c = 0; c < 2; ++c) {
			CHECK(((is_missing(joined.weather(1)(i, c)) && is_missing(panel.weather(1)(i, c))) ||
			       joined.weather(1)(i, c) == panel.weather(1)(i, c)));
			CHECK(joined.outages()(i, c) == panel.outages()(i, c));
		}
	}
}

TEST_CASE("write then load round-trips a panel byte-exactly") {
	TempDir dir("panel");
	auto panel = gridcast::testing::make_panel(10, {"A", "B"}, 2);
	std::mt19937_64 rng(3);
	std::uniform_real_distribution<double> value(0.0, 10.0);
	for (std::size_t i = 0; i < 10; ++i) {
		for (std::size_t c = 0; c < 2; ++c) {
			panel.outages()(i, c) = std::floor(value(rng));
			panel.tracked()(i, c) = value(rng);
			panel.weather(0)(i, c) = value(rng);
			panel.weather(1)(i, c) = value(rng);
		}
	}
	write_panel_csv(panel, dir.file("out.csv"), CsvSchema{});
	const PanelDataset loaded = load_panel_csv(dir.file("out.csv"), CsvSchema{});
	CHECK(loaded.time() == panel.time());
	for (std::size_t i = 0; i < 10; ++i) {
		for (std::size_t c = 0; c < 2; ++c) {
			CHECK(loaded.tracked()(i, c) == panel.tracked()(i, c));
			CHECK(loaded.weather(1)(i, c) == panel.weather(1)(i, c));
		}
	}
	// Rewriting the loaded panel reproduces the file byte-for-byte.
	write_panel_csv(loaded, dir.file("out2.csv"), CsvSchema{});
	CHECK(gridcast::testing::read_file(dir.file("out.csv")) ==
	      gridcast::testing::read_file(dir.file("out2.csv")));
}

TEST_SUITE_END();
