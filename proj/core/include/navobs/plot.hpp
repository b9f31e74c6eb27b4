#pragma once

#include <string>
#include <vector>

namespace navobs::plot {

struct Series {
  std::string label;
  std::string color;  // any SVG color
  std::vector<double> x;
  std::vector<double> y;
  bool dashed = false;
};

struct LineChart {
  std::string title;
  std::string x_label;
  std::string y_label;
  std::vector<Series> series;
  /// Keep the x and y scales equal (used for planar trajectories).
  bool equal_aspect = false;
};

/// Renders a self-contained SVG document. Non-finite points are skipped.
std::string render_svg(const LineChart& chart);

}  // namespace navobs::plot
