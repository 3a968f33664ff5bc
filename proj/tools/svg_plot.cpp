#include "svg_plot.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include <gridcast/csv.hpp>

namespace gridcast::cli {

namespace {

constexpr double kWidth = 720.0;
constexpr double kHeight = 400.0;
constexpr double kMarginLeft = 56.0;
constexpr double kMarginRight = 16.0;
constexpr double kMarginTop = 32.0;
constexpr double kMarginBottom = 40.0;

// Polyline segments, split wherever the series has a NaN.
void append_series(std::ostringstream& out, const std::vector<double>& series, double lo, double hi,
                   const std::string& color) {
	const double plot_w = kWidth - kMarginLeft - kMarginRight;
	const double plot_h = kHeight - kMarginTop - kMarginBottom;
	const double span = hi - lo > 0 ? hi - lo : 1.0;
	const auto n = series.size();

	std::vector<std::pair<double, double>> segment;
	auto flush = [&] {
		if (segment.size() < 2) {
			segment.clear();
			return;
		}
		out << "  <polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\" points=\"";
		for (const auto& [x, y] : segment) {
			out << format_double(x) << ',' << format_double(y) << ' ';
		}
		out << "\"/>\n";
		segment.clear();
	};

	for (std::size_t i = 0; i < n; ++i) {
		if (std::isnan(series[i])) {
			flush();
			continue;
		}
		const double x = kMarginLeft + (n > 1 ? plot_w * static_cast<double>(i) / static_cast<double>(n - 1)
		                                      : plot_w / 2.0);
		const double y = kMarginTop + plot_h * (1.0 - (series[i] - lo) / span);
		segment.emplace_back(x, y);
	}
	flush();
}

} // namespace

std::string render_forecast_svg(const std::string& title, const std::vector<double>& actual,
                                const std::vector<double>& forecast) {
	double lo = 0.0, hi = 1.0;
	bool seen = false;
	for (const auto& series : {actual, forecast}) {
		for (const double v : series) {
			if (std::isnan(v)) continue;
			if (!seen) {
				lo = hi = v;
				seen = true;
			} else {
				lo = std::min(lo, v);
				hi = std::max(hi, v);
			}
		}
	}
	lo = std::min(lo, 0.0);
	if (!(hi > lo)) hi = lo + 1.0;

	std::ostringstream out;
	out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\"" << kHeight
	    << "\" viewBox=\"0 0 " << kWidth << ' ' << kHeight << "\">\n";
	out << "  <rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
	out << "  <text x=\"" << kMarginLeft << "\" y=\"20\" font-family=\"sans-serif\" font-size=\"14\">" << title
	    << "</text>\n";
	// Axes.
	out << "  <line x1=\"" << kMarginLeft << "\" y1=\"" << kMarginTop << "\" x2=\"" << kMarginLeft
	    << "\" y2=\"" << (kHeight - kMarginBottom) << "\" stroke=\"black\"/>\n";
	out << "  <line x1=\"" << kMarginLeft << "\" y1=\"" << (kHeight - kMarginBottom) << "\" x2=\""
	    << (kWidth - kMarginRight) << "\" y2=\"" << (kHeight - kMarginBottom) << "\" stroke=\"black\"/>\n";
	out << "  <text x=\"4\" y=\"" << (kMarginTop + 4) << "\" font-family=\"sans-serif\" font-size=\"11\">"
	    << format_double(hi) << "</text>\n";
	out << "  <text x=\"4\" y=\"" << (kHeight - kMarginBottom) << "\" font-family=\"sans-serif\" font-size=\"11\">"
	    << format_double(lo) << "</text>\n";

	append_series(out, actual, lo, hi, "#888888");
	append_series(out, forecast, lo, hi, "#1f77b4");

	// Legend.
	out << "  <line x1=\"" << (kWidth - 180) << "\" y1=\"16\" x2=\"" << (kWidth - 150)
	    << "\" y2=\"16\" stroke=\"#888888\" stroke-width=\"1.5\"/>\n";
	out << "  <text x=\"" << (kWidth - 144) << "\" y=\"20\" font-family=\"sans-serif\" font-size=\"11\">actual</text>\n";
	out << "  <line x1=\"" << (kWidth - 96) << "\" y1=\"16\" x2=\"" << (kWidth - 66)
	    << "\" y2=\"16\" stroke=\"#1f77b4\" stroke-width=\"1.5\"/>\n";
	out << "  <text x=\"" << (kWidth - 60) << "\" y=\"20\" font-family=\"sans-serif\" font-size=\"11\">forecast</text>\n";
	out << "</svg>\n";
	return out.str();
}

} // namespace gridcast::cli
