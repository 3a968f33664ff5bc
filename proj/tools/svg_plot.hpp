#pragma once

#include <string>
#include <vector>

namespace gridcast::cli {

/// Forecast-vs-actual line plot as a standalone SVG document. NaN entries
/// in the actual series break the line.
std::string render_forecast_svg(const std::string& title, const std::vector<double>& actual,
                                const std::vector<double>& forecast);

} // namespace gridcast::cli
