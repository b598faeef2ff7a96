#include "ewanet/svg.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace ewanet {

namespace {

struct Frame {
  double xmin, xmax, ymin, ymax;
  int width, height;
  static constexpr int margin = 54;

  double px(double x) const {
    return margin + (x - xmin) / (xmax - xmin) * (width - 2 * margin);
  }
  double py(double y) const {
    return height - margin - (y - ymin) / (ymax - ymin) * (height - 2 * margin);
  }
};

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(5);
  os << v;
  return os.str();
}

void axes(std::ostringstream& os, const Frame& fr, const std::string& title,
          const std::string& xlabel, const std::string& ylabel) {
  os << "<rect width='100%' height='100%' fill='white'/>\n";
  os << "<line x1='" << fr.margin << "' y1='" << fr.height - fr.margin << "' x2='"
     << fr.width - fr.margin << "' y2='" << fr.height - fr.margin
     << "' stroke='black' stroke-width='1'/>\n";
  os << "<line x1='" << fr.margin << "' y1='" << fr.margin << "' x2='" << fr.margin << "' y2='"
     << fr.height - fr.margin << "' stroke='black' stroke-width='1'/>\n";
  for (int k = 0; k <= 4; ++k) {
    const double x = fr.xmin + (fr.xmax - fr.xmin) * k / 4;
    const double y = fr.ymin + (fr.ymax - fr.ymin) * k / 4;
    os << "<text x='" << fr.px(x) << "' y='" << fr.height - fr.margin + 16
       << "' font-size='10' text-anchor='middle'>" << fmt(x) << "</text>\n";
    os << "<text x='" << fr.margin - 6 << "' y='" << fr.py(y) + 3
       << "' font-size='10' text-anchor='end'>" << fmt(y) << "</text>\n";
  }
  os << "<text x='" << fr.width / 2 << "' y='18' font-size='13' text-anchor='middle'>" << title
     << "</text>\n";
  os << "<text x='" << fr.width / 2 << "' y='" << fr.height - 8
     << "' font-size='11' text-anchor='middle'>" << xlabel << "</text>\n";
  os << "<text x='14' y='" << fr.height / 2
     << "' font-size='11' text-anchor='middle' transform='rotate(-90 14 " << fr.height / 2
     << ")'>" << ylabel << "</text>\n";
}

}  // namespace

std::string svg_chart(const std::string& title, const std::string& xlabel,
                      const std::string& ylabel, const std::vector<SvgSeries>& series, int width,
                      int height) {
  double xmin = std::numeric_limits<double>::max(), xmax = -xmin;
  double ymin = xmin, ymax = -xmin;
  for (const auto& s : series) {
    for (const auto& [x, y] : s.points) {
      xmin = std::min(xmin, x);
      xmax = std::max(xmax, x);
      ymin = std::min(ymin, y);
      ymax = std::max(ymax, y);
    }
  }
  if (!(xmax > xmin)) { xmax = xmin + 1; xmin -= 1; }
  if (!(ymax > ymin)) { ymax = ymin + 1; ymin -= 1; }
  const double padx = 0.05 * (xmax - xmin), pady = 0.05 * (ymax - ymin);
  Frame fr{xmin - padx, xmax + padx, ymin - pady, ymax + pady, width, height};

  std::ostringstream os;
  os << "<svg xmlns='http://www.w3.org/2000/svg' width='" << width << "' height='" << height
     << "'>\n";
  axes(os, fr, title, xlabel, ylabel);
  for (const auto& s : series) {
    if (s.line && s.points.size() > 1) {
      os << "<polyline fill='none' stroke='" << s.color << "' stroke-width='1.5' points='";
      for (const auto& [x, y] : s.points) os << fmt(fr.px(x)) << ',' << fmt(fr.py(y)) << ' ';
      os << "'/>\n";
    }
    if (s.markers) {
      for (const auto& [x, y] : s.points)
        os << "<circle cx='" << fmt(fr.px(x)) << "' cy='" << fmt(fr.py(y))
           << "' r='2.5' fill='" << s.color << "'/>\n";
    }
  }
  os << "</svg>\n";
  return os.str();
}

std::string svg_vector_field(const std::string& title, const std::vector<SvgArrow>& arrows,
                             double lo, double hi, int width) {
  Frame fr{lo, hi, lo, hi, width, width};
  double max_mag = 1e-12;
  for (const auto& a : arrows) max_mag = std::max(max_mag, std::hypot(a.dx, a.dy));
  const double cell = (hi - lo) / std::max(1.0, std::sqrt(double(arrows.size())));
  std::ostringstream os;
  os << "<svg xmlns='http://www.w3.org/2000/svg' width='" << width << "' height='" << width
     << "'>\n";
  axes(os, fr, title, "q_0", "q_1");
  for (const auto& a : arrows) {
    const double scale = 0.8 * cell / max_mag;
    const double x2 = a.x + a.dx * scale, y2 = a.y + a.dy * scale;
    os << "<line x1='" << fmt(fr.px(a.x)) << "' y1='" << fmt(fr.py(a.y)) << "' x2='"
       << fmt(fr.px(x2)) << "' y2='" << fmt(fr.py(y2))
       << "' stroke='#444444' stroke-width='0.8'/>\n";
    os << "<circle cx='" << fmt(fr.px(x2)) << "' cy='" << fmt(fr.py(y2))
       << "' r='1.2' fill='#444444'/>\n";
  }
  os << "</svg>\n";
  return os.str();
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path + " for writing");
  out << content;
  if (!out.good()) throw std::runtime_error("write failed for " + path);
}

}  // namespace ewanet
