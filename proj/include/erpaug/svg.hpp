#pragma once

#include <string>
#include <utility>
#include <vector>

namespace erpaug {

struct Series {
  std::string name;
  std::vector<std::pair<double, double>> points;  // sorted by x on output
};

// Standalone SVG document; no external renderer needed.
std::string svg_line_chart(const std::string& title, const std::string& x_label, const std::string& y_label,
                           std::vector<Series> series);

// values[r][c]; NaN cells are drawn blank.
std::string svg_heat_map(const std::string& title, const std::vector<std::string>& row_labels,
                         const std::vector<std::string>& col_labels, const std::vector<std::vector<double>>& values);

}  // namespace erpaug
