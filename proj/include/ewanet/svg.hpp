#pragma once

#include <string>
#include <utility>
#include <vector>

namespace ewanet {

// Hand-rolled SVG scatter/line primitives. CSV files are the authoritative
// outputs; these are convenience views.
struct SvgSeries {
  std::vector<std::pair<double, double>> points;
  std::string color = "#1f6fb4";
  bool line = true;
  bool markers = true;
};

std::string svg_chart(const std::string& title, const std::string& xlabel,
                      const std::string& ylabel, const std::vector<SvgSeries>& series,
                      int width = 640, int height = 440);

// Arrow field for the two-agent phase portrait.
struct SvgArrow {
  double x, y, dx, dy;
};
std::string svg_vector_field(const std::string& title, const std::vector<SvgArrow>& arrows,
                             double lo, double hi, int width = 640);

void write_text_file(const std::string& path, const std::string& content);

}  // namespace ewanet
