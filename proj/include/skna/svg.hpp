#pragma once

// Small self-contained SVG line plots: stacked panels, several traces per
// panel, min/max decimation per pixel column so spikes survive downsampling.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <string>
#include <vector>

#include "errors.hpp"
#include "io_util.hpp"
#include "series.hpp"

namespace skna {

struct SvgTrace {
  std::string label;
  std::string color = "#1f77b4";
  double rate = 1.0;           // samples per second; x = index / rate
  std::vector<double> values;
};

struct SvgPanel {
  std::string title;
  std::string y_label;
  std::vector<SvgTrace> traces;
};

struct SvgFigure {
  std::string title;
  std::vector<SvgPanel> panels;
  int width = 960;
  int panel_height = 180;
};

namespace svg_detail {

inline std::string num(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.2f", v);
  return buf;
}

inline void append_polyline(std::string& out, const SvgTrace& trace, double t_max,
                            double y_min, double y_max, double x0, double y0, double w,
                            double h) {
  if (trace.values.empty()) return;
  const double y_span = (y_max > y_min) ? (y_max - y_min) : 1.0;
  auto map_x = [&](double t) { return x0 + (t_max > 0.0 ? t / t_max : 0.0) * w; };
  auto map_y = [&](double v) { return y0 + h - (v - y_min) / y_span * h; };

  out += "<polyline fill=\"none\" stroke=\"" + trace.color +
         "\" stroke-width=\"0.8\" points=\"";
  const std::size_t n = trace.values.size();
  const std::size_t columns = static_cast<std::size_t>(std::max(1.0, w));
  if (n <= 2 * columns) {
    for (std::size_t i = 0; i < n; ++i) {
      out += num(map_x(static_cast<double>(i) / trace.rate)) + "," +
             num(map_y(trace.values[i])) + " ";
    }
  } else {
    // One (min, max) pair per pixel column, emitted in sample order.
    for (std::size_t c = 0; c < columns; ++c) {
      const std::size_t i_lo = c * n / columns;
      const std::size_t i_hi = std::max(i_lo + 1, (c + 1) * n / columns);
      double lo = trace.values[i_lo], hi = trace.values[i_lo];
      std::size_t lo_at = i_lo, hi_at = i_lo;
      for (std::size_t i = i_lo; i < i_hi; ++i) {
        if (trace.values[i] < lo) { lo = trace.values[i]; lo_at = i; }
        if (trace.values[i] > hi) { hi = trace.values[i]; hi_at = i; }
      }
      const std::size_t first = std::min(lo_at, hi_at);
      const std::size_t second = std::max(lo_at, hi_at);
      out += num(map_x(static_cast<double>(first) / trace.rate)) + "," +
             num(map_y(trace.values[first])) + " ";
      if (second != first) {
        out += num(map_x(static_cast<double>(second) / trace.rate)) + "," +
               num(map_y(trace.values[second])) + " ";
      }
    }
  }
  out += "\"/>\n";
}

}  // namespace svg_detail

inline std::string render_svg(const SvgFigure& fig) {
  if (fig.panels.empty()) throw ConfigError("svg: figure has no panels");
  const double margin_l = 70.0, margin_r = 20.0, margin_top = 40.0, margin_between = 34.0;
  const double plot_w = fig.width - margin_l - margin_r;
  const double total_h =
      margin_top + fig.panels.size() * (fig.panel_height + margin_between) + 10.0;

  std::string out;
  out += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + std::to_string(fig.width) +
         "\" height=\"" + std::to_string(static_cast<int>(total_h)) + "\" viewBox=\"0 0 " +
         std::to_string(fig.width) + " " + std::to_string(static_cast<int>(total_h)) +
         "\">\n";
  out += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  out += "<text x=\"" + svg_detail::num(fig.width / 2.0) +
         "\" y=\"22\" font-family=\"sans-serif\" font-size=\"15\" text-anchor=\"middle\">" +
         fig.title + "</text>\n";

  double panel_top = margin_top;
  for (const auto& panel : fig.panels) {
    double t_max = 0.0;
    double y_min = std::numeric_limits<double>::infinity();
    double y_max = -std::numeric_limits<double>::infinity();
    for (const auto& tr : panel.traces) {
      if (tr.values.empty()) continue;
      if (!(tr.rate > 0.0)) throw ConfigError("svg: trace rate must be positive");
      t_max = std::max(t_max, static_cast<double>(tr.values.size() - 1) / tr.rate);
      for (double v : tr.values) {
        y_min = std::min(y_min, v);
        y_max = std::max(y_max, v);
      }
    }
    if (!(y_min <= y_max)) { y_min = 0.0; y_max = 1.0; }
    if (y_min == y_max) { y_min -= 0.5; y_max += 0.5; }

    out += "<rect x=\"" + svg_detail::num(margin_l) + "\" y=\"" + svg_detail::num(panel_top) +
           "\" width=\"" + svg_detail::num(plot_w) + "\" height=\"" +
           std::to_string(fig.panel_height) +
           "\" fill=\"none\" stroke=\"#888\" stroke-width=\"0.6\"/>\n";
    out += "<text x=\"" + svg_detail::num(margin_l) + "\" y=\"" +
           svg_detail::num(panel_top - 6.0) +
           "\" font-family=\"sans-serif\" font-size=\"12\">" + panel.title + "</text>\n";
    out += "<text x=\"14\" y=\"" + svg_detail::num(panel_top + fig.panel_height / 2.0) +
           "\" font-family=\"sans-serif\" font-size=\"11\" text-anchor=\"middle\" "
           "transform=\"rotate(-90 14 " +
           svg_detail::num(panel_top + fig.panel_height / 2.0) + ")\">" + panel.y_label +
           "</text>\n";
    // y-axis extremes and x-axis end labels
    out += "<text x=\"" + svg_detail::num(margin_l - 6.0) + "\" y=\"" +
           svg_detail::num(panel_top + 10.0) +
           "\" font-family=\"sans-serif\" font-size=\"10\" text-anchor=\"end\">" +
           format_fixed(y_max, 3) + "</text>\n";
    out += "<text x=\"" + svg_detail::num(margin_l - 6.0) + "\" y=\"" +
           svg_detail::num(panel_top + fig.panel_height) +
           "\" font-family=\"sans-serif\" font-size=\"10\" text-anchor=\"end\">" +
           format_fixed(y_min, 3) + "</text>\n";
    out += "<text x=\"" + svg_detail::num(margin_l + plot_w) + "\" y=\"" +
           svg_detail::num(panel_top + fig.panel_height + 14.0) +
           "\" font-family=\"sans-serif\" font-size=\"10\" text-anchor=\"end\">" +
           format_fixed(t_max, 1) + " s</text>\n";

    for (const auto& tr : panel.traces) {
      svg_detail::append_polyline(out, tr, t_max, y_min, y_max, margin_l, panel_top, plot_w,
                                  static_cast<double>(fig.panel_height));
    }
    // legend, one entry per trace
    double lx = margin_l + 8.0;
    for (const auto& tr : panel.traces) {
      out += "<rect x=\"" + svg_detail::num(lx) + "\" y=\"" +
             svg_detail::num(panel_top + 6.0) + "\" width=\"10\" height=\"3\" fill=\"" +
             tr.color + "\"/>\n";
      out += "<text x=\"" + svg_detail::num(lx + 14.0) + "\" y=\"" +
             svg_detail::num(panel_top + 12.0) +
             "\" font-family=\"sans-serif\" font-size=\"10\">" + tr.label + "</text>\n";
      lx += 18.0 + 7.0 * static_cast<double>(tr.label.size());
    }
    panel_top += fig.panel_height + margin_between;
  }
  out += "</svg>\n";
  return out;
}

inline void save_svg(const std::string& path, const SvgFigure& fig) {
  write_file_atomic(path, render_svg(fig));
}

}  // namespace skna
