#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace reldiff {

struct Series {
  std::string label;
  std::vector<double> x;
  std::vector<double> y;
};

/// "# x_label y_label" header, then one whitespace-separated pair per line.
void write_plot_data(std::ostream& os, const Series& series, const std::string& x_label, const std::string& y_label);

struct ChartOptions {
  std::string title;
  std::string x_label;
  std::string y_label;
  bool log_x = false;
  bool log_y = false;
  int width = 640;
  int height = 400;
};

/// Self-contained SVG line chart. Non-positive values are dropped on log axes.
std::string render_svg(const std::vector<Series>& series, const ChartOptions& options);

}  // namespace reldiff
