#pragma once

#include <string>
#include <vector>

namespace scc5g::plot {

struct Series {
  std::vector<double> x;
  std::vector<double> y;
};

/// Minimal single-series line chart as an SVG document.
std::string line_chart_svg(const std::string& title, const std::string& x_label,
                           const std::string& y_label, const Series& series);

}  // namespace scc5g::plot
