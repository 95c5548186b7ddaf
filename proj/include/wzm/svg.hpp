#pragma once

#include <cstdio>
#include <fstream>
#include <string>
#include <utility>
#include <vector>

#include "wzm/errors.hpp"

namespace wzm {

struct SvgCurve {
  std::string label;
  std::vector<std::pair<double, double>> points;  // (x, y) in data units
};

namespace detail {

inline std::string fmt2(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.2f", v);
  return buf;
}

}  // namespace detail

// Static SVG 1.1 line chart: fixed 800x600 viewport, both axes spanning
// [0, 1], one polyline per curve plus a legend. No external dependencies
// and no script content.
inline std::string render_svg_chart(const std::vector<SvgCurve>& curves,
                                    const std::string& title,
                                    const std::string& x_label,
                                    const std::string& y_label) {
  const double width = 800.0, height = 600.0;
  const double left = 70.0, right = 770.0, top = 50.0, bottom = 550.0;
  const auto px = [&](double x) { return left + x * (right - left); };
  const auto py = [&](double y) { return bottom - y * (bottom - top); };

  static const char* palette[] = {"#1f77b4", "#ff7f0e", "#2ca02c", "#d62728",
                                  "#9467bd", "#8c564b", "#e377c2", "#7f7f7f"};
  const std::size_t ncolors = sizeof(palette) / sizeof(palette[0]);

  std::string s;
  s += "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  s += "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"800\" "
       "height=\"600\" viewBox=\"0 0 800 600\">\n";
  s += "<rect x=\"0\" y=\"0\" width=\"" + detail::fmt2(width) + "\" height=\"" +
       detail::fmt2(height) + "\" fill=\"white\"/>\n";
  s += "<text x=\"400\" y=\"28\" font-family=\"sans-serif\" font-size=\"18\" "
       "text-anchor=\"middle\">" + title + "</text>\n";

  // axes and ticks every 0.2
  for (int i = 0; i <= 5; ++i) {
    const double v = 0.2 * i;
    char label[16];
    std::snprintf(label, sizeof(label), "%.1f", v);
    s += "<line x1=\"" + detail::fmt2(px(v)) + "\" y1=\"" + detail::fmt2(bottom) +
         "\" x2=\"" + detail::fmt2(px(v)) + "\" y2=\"" + detail::fmt2(top) +
         "\" stroke=\"#dddddd\" stroke-width=\"1\"/>\n";
    s += "<line x1=\"" + detail::fmt2(left) + "\" y1=\"" + detail::fmt2(py(v)) +
         "\" x2=\"" + detail::fmt2(right) + "\" y2=\"" + detail::fmt2(py(v)) +
         "\" stroke=\"#dddddd\" stroke-width=\"1\"/>\n";
    s += "<text x=\"" + detail::fmt2(px(v)) + "\" y=\"" + detail::fmt2(bottom + 22.0) +
         "\" font-family=\"sans-serif\" font-size=\"13\" text-anchor=\"middle\">" +
         label + "</text>\n";
    s += "<text x=\"" + detail::fmt2(left - 10.0) + "\" y=\"" +
         detail::fmt2(py(v) + 4.0) +
         "\" font-family=\"sans-serif\" font-size=\"13\" text-anchor=\"end\">" +
         label + "</text>\n";
  }
  s += "<line x1=\"" + detail::fmt2(left) + "\" y1=\"" + detail::fmt2(bottom) +
       "\" x2=\"" + detail::fmt2(right) + "\" y2=\"" + detail::fmt2(bottom) +
       "\" stroke=\"black\" stroke-width=\"1.5\"/>\n";
  s += "<line x1=\"" + detail::fmt2(left) + "\" y1=\"" + detail::fmt2(bottom) +
       "\" x2=\"" + detail::fmt2(left) + "\" y2=\"" + detail::fmt2(top) +
       "\" stroke=\"black\" stroke-width=\"1.5\"/>\n";
  s += "<text x=\"420\" y=\"588\" font-family=\"sans-serif\" font-size=\"15\" "
       "text-anchor=\"middle\">" + x_label + "</text>\n";
  s += "<text x=\"22\" y=\"300\" font-family=\"sans-serif\" font-size=\"15\" "
       "text-anchor=\"middle\" transform=\"rotate(-90 22 300)\">" + y_label +
       "</text>\n";

  for (std::size_t c = 0; c < curves.size(); ++c) {
    const char* color = palette[c % ncolors];
    s += "<polyline fill=\"none\" stroke=\"";
    s += color;
    s += "\" stroke-width=\"2\" points=\"";
    for (const auto& [x, y] : curves[c].points) {
      s += detail::fmt2(px(x));
      s += ",";
      s += detail::fmt2(py(y));
      s += " ";
    }
    s += "\"/>\n";
  }

  // legend, top-left inside the plot area
  for (std::size_t c = 0; c < curves.size(); ++c) {
    const double ly = top + 20.0 + 22.0 * static_cast<double>(c);
    s += "<line x1=\"" + detail::fmt2(left + 14.0) + "\" y1=\"" + detail::fmt2(ly) +
         "\" x2=\"" + detail::fmt2(left + 44.0) + "\" y2=\"" + detail::fmt2(ly) +
         "\" stroke=\"";
    s += palette[c % ncolors];
    s += "\" stroke-width=\"2\"/>\n";
    s += "<text x=\"" + detail::fmt2(left + 52.0) + "\" y=\"" + detail::fmt2(ly + 4.0) +
         "\" font-family=\"sans-serif\" font-size=\"13\">" + curves[c].label +
         "</text>\n";
  }

  s += "</svg>\n";
  return s;
}

inline void write_svg_chart(const std::string& path, const std::vector<SvgCurve>& curves,
                            const std::string& title, const std::string& x_label,
                            const std::string& y_label) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw io_error("cannot open for writing: " + path);
  out << render_svg_chart(curves, title, x_label, y_label);
  if (!out) throw io_error("write failed: " + path);
}

}  // namespace wzm
