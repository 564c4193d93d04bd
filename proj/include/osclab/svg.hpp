#pragma once

// Static SVG polyline charts (optionally log-scaled axes).

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace osclab {

struct SvgSeries {
  std::string name;
  std::vector<std::pair<double, double>> points;
};

inline void svg_line_chart(const std::string& path, const std::string& title,
                           const std::string& xlabel, const std::string& ylabel,
                           const std::vector<SvgSeries>& series,
                           bool log_x = false, bool log_y = false) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("svg_line_chart: cannot open " + path);
  const int W = 800, H = 500, ml = 70, mr = 150, mt = 40, mb = 55;

  auto tx = [&](double v) { return log_x ? std::log10(v) : v; };
  auto ty = [&](double v) { return log_y ? std::log10(v) : v; };

  double xmin = 1e300, xmax = -1e300, ymin = 1e300, ymax = -1e300;
  for (const auto& s : series)
    for (const auto& [x, y] : s.points) {
      if (log_x && !(x > 0)) continue;
      if (log_y && !(y > 0)) continue;
      xmin = std::min(xmin, tx(x));
      xmax = std::max(xmax, tx(x));
      ymin = std::min(ymin, ty(y));
      ymax = std::max(ymax, ty(y));
    }
  if (!(xmin <= xmax)) xmin = 0, xmax = 1;
  if (!(ymin <= ymax)) ymin = 0, ymax = 1;
  if (xmax == xmin) xmax = xmin + 1;
  if (ymax == ymin) ymax = ymin + 1;

  auto px = [&](double v) {
    return ml + (tx(v) - xmin) / (xmax - xmin) * (W - ml - mr);
  };
  auto py = [&](double v) {
    return H - mb - (ty(v) - ymin) / (ymax - ymin) * (H - mt - mb);
  };
  auto num = [](double v) {
    char b[32];
    std::snprintf(b, sizeof(b), "%.6g", v);
    return std::string(b);
  };

  static const char* colors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                                 "#ff7f0e", "#8c564b", "#17becf", "#7f7f7f"};

  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W
      << "\" height=\"" << H << "\">\n"
      << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
      << "<text x=\"" << W / 2 << "\" y=\"22\" text-anchor=\"middle\" "
         "font-size=\"15\">" << title << "</text>\n";

  // axes
  out << "<line x1=\"" << ml << "\" y1=\"" << H - mb << "\" x2=\"" << W - mr
      << "\" y2=\"" << H - mb << "\" stroke=\"black\"/>\n"
      << "<line x1=\"" << ml << "\" y1=\"" << mt << "\" x2=\"" << ml
      << "\" y2=\"" << H - mb << "\" stroke=\"black\"/>\n";
  for (int i = 0; i <= 5; ++i) {
    const double fx = xmin + (xmax - xmin) * i / 5.0;
    const double fy = ymin + (ymax - ymin) * i / 5.0;
    const double vx = log_x ? std::pow(10.0, fx) : fx;
    const double vy = log_y ? std::pow(10.0, fy) : fy;
    out << "<line x1=\"" << px(vx) << "\" y1=\"" << H - mb << "\" x2=\""
        << px(vx) << "\" y2=\"" << H - mb + 5 << "\" stroke=\"black\"/>\n"
        << "<text x=\"" << px(vx) << "\" y=\"" << H - mb + 18
        << "\" text-anchor=\"middle\" font-size=\"11\">" << num(vx)
        << "</text>\n"
        << "<line x1=\"" << ml - 5 << "\" y1=\"" << py(vy) << "\" x2=\"" << ml
        << "\" y2=\"" << py(vy) << "\" stroke=\"black\"/>\n"
        << "<text x=\"" << ml - 8 << "\" y=\"" << py(vy) + 4
        << "\" text-anchor=\"end\" font-size=\"11\">" << num(vy) << "</text>\n";
  }
  out << "<text x=\"" << (ml + W - mr) / 2 << "\" y=\"" << H - 12
      << "\" text-anchor=\"middle\" font-size=\"13\">" << xlabel << "</text>\n"
      << "<text x=\"16\" y=\"" << (mt + H - mb) / 2
      << "\" text-anchor=\"middle\" font-size=\"13\" transform=\"rotate(-90 16 "
      << (mt + H - mb) / 2 << ")\">" << ylabel << "</text>\n";

  int ci = 0;
  for (const auto& s : series) {
    const char* color = colors[ci % 8];
    out << "<polyline fill=\"none\" stroke=\"" << color
        << "\" stroke-width=\"1.5\" points=\"";
    for (const auto& [x, y] : s.points) {
      if (log_x && !(x > 0)) continue;
      if (log_y && !(y > 0)) continue;
      out << num(px(x)) << "," << num(py(y)) << " ";
    }
    out << "\"/>\n"
        << "<text x=\"" << W - mr + 10 << "\" y=\"" << mt + 16 * ci + 10
        << "\" font-size=\"12\" fill=\"" << color << "\">" << s.name
        << "</text>\n";
    ++ci;
  }
  out << "</svg>\n";
}

}  // namespace osclab
