#pragma once

#include <string>
#include <utility>
#include <vector>

namespace sparsedyn {

struct SvgSeries {
  std::string label;
  std::vector<std::pair<double, double>> points;  // (x, y), NaN y values are skipped
};

// Minimal self-contained line chart (no external assets). Each series gets a
// polyline with markers and a legend entry; log_y switches the y axis to a
// log10 scale (requires positive y values, others are dropped).
std::string line_chart_svg(const std::string& title, const std::string& x_label,
                           const std::string& y_label, const std::vector<SvgSeries>& series,
                           bool log_y = false);

}  // namespace sparsedyn
