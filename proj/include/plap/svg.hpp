#pragma once

#include <string>
#include <vector>

namespace plap {

/// One polyline of a plot.
struct SvgSeries {
  std::string label;
  std::vector<double> x;
  std::vector<double> y;
};

/// Axis scaling for line_plot_svg.
struct SvgAxes {
  std::string x_label;
  std::string y_label;
  bool log_x = false;
  bool log_y = false;
};

/// Self-contained 720x480 SVG line plot: frame, ticks, series polylines with
/// point markers, legend. Log axes drop nonpositive samples. Output is a
/// deterministic function of the inputs (fixed palette, %.6g tick labels).
/// Presentation only — nothing is asserted here.
std::string line_plot_svg(const std::string& title, const SvgAxes& axes,
                          const std::vector<SvgSeries>& series);

}  // namespace plap
