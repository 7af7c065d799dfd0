#pragma once

#include <filesystem>
#include <string>
#include <vector>

namespace kzp::svg {

struct Line {
  std::string label;
  std::vector<double> x;
  std::vector<double> y;
  std::string color = "#1f77b4";
  bool markers = false;  // draw stems instead of a polyline
};

/// Minimal self-contained SVG line chart.
struct LineChart {
  std::string title;
  std::string x_label;
  std::string y_label;
  bool log_y = false;
  int width = 800;
  int height = 480;
  std::vector<Line> lines;

  std::string render() const;
  void save(const std::filesystem::path& path) const;
};

}  // namespace kzp::svg
