#pragma once

// Minimal standalone SVG emission for the CLI's charts. Numeric output uses
// fixed two-decimal coordinates so identical inputs give identical bytes.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <string>
#include <vector>

namespace cli::svg {

inline std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.2f", v);
  return buf;
}

inline const char* series_color(size_t index) {
  static const char* palette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                                  "#ff7f0e", "#8c564b", "#17becf", "#7f7f7f"};
  return palette[index % 8];
}

// diverging blue-white-red for v in [-1, 1]
inline std::string diverging_color(double v) {
  v = std::clamp(v, -1.0, 1.0);
  int r = 255, g = 255, b = 255;
  if (v >= 0) {
    g = static_cast<int>(std::lround(255 * (1.0 - v)));
    b = g;
  } else {
    r = static_cast<int>(std::lround(255 * (1.0 + v)));
    g = r;
  }
  char buf[8];
  std::snprintf(buf, sizeof(buf), "#%02x%02x%02x", r, g, b);
  return buf;
}

struct Series {
  std::string label;
  std::vector<double> values;  // y per integer step 1..n
};

// Line chart over integer steps with a [-1, 1]-friendly autoscaled y axis.
inline std::string line_chart(const std::string& title, const std::string& x_label,
                              const std::string& y_label, const std::vector<Series>& series) {
  const double width = 640, height = 420;
  const double left = 70, right = 150, top = 50, bottom = 50;
  const double plot_w = width - left - right, plot_h = height - top - bottom;

  double y_min = 1e300, y_max = -1e300;
  size_t steps = 1;
  for (const auto& s : series) {
    steps = std::max(steps, s.values.size());
    for (double v : s.values) {
      y_min = std::min(y_min, v);
      y_max = std::max(y_max, v);
    }
  }
  if (y_min > y_max) {
    y_min = -1;
    y_max = 1;
  }
  const double pad = std::max(0.05, 0.1 * (y_max - y_min));
  y_min -= pad;
  y_max += pad;

  auto sx = [&](double step) {
    return left + (steps > 1 ? (step - 1) / (double)(steps - 1) : 0.5) * plot_w;
  };
  auto sy = [&](double v) { return top + (y_max - v) / (y_max - y_min) * plot_h; };

  std::string out;
  out += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + num(width) + "\" height=\"" +
         num(height) + "\">\n";
  out += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  out += "<text x=\"" + num(width / 2) + "\" y=\"24\" text-anchor=\"middle\" font-size=\"15\" "
         "font-family=\"sans-serif\">" + title + "</text>\n";
  out += "<rect x=\"" + num(left) + "\" y=\"" + num(top) + "\" width=\"" + num(plot_w) +
         "\" height=\"" + num(plot_h) + "\" fill=\"none\" stroke=\"#333\"/>\n";

  for (int t = 0; t <= 4; ++t) {
    const double v = y_min + t * (y_max - y_min) / 4;
    const double y = sy(v);
    out += "<line x1=\"" + num(left - 4) + "\" y1=\"" + num(y) + "\" x2=\"" + num(left) +
           "\" y2=\"" + num(y) + "\" stroke=\"#333\"/>\n";
    out += "<text x=\"" + num(left - 8) + "\" y=\"" + num(y + 4) +
           "\" text-anchor=\"end\" font-size=\"11\" font-family=\"sans-serif\">" + num(v) +
           "</text>\n";
  }
  const size_t tick_every = std::max<size_t>(1, steps / 8);
  for (size_t t = 1; t <= steps; t += tick_every) {
    const double x = sx((double)t);
    out += "<line x1=\"" + num(x) + "\" y1=\"" + num(top + plot_h) + "\" x2=\"" + num(x) +
           "\" y2=\"" + num(top + plot_h + 4) + "\" stroke=\"#333\"/>\n";
    out += "<text x=\"" + num(x) + "\" y=\"" + num(top + plot_h + 18) +
           "\" text-anchor=\"middle\" font-size=\"11\" font-family=\"sans-serif\">" +
           std::to_string(t) + "</text>\n";
  }
  out += "<text x=\"" + num(left + plot_w / 2) + "\" y=\"" + num(height - 12) +
         "\" text-anchor=\"middle\" font-size=\"12\" font-family=\"sans-serif\">" + x_label +
         "</text>\n";
  out += "<text x=\"18\" y=\"" + num(top + plot_h / 2) +
         "\" text-anchor=\"middle\" font-size=\"12\" font-family=\"sans-serif\" "
         "transform=\"rotate(-90 18 " + num(top + plot_h / 2) + ")\">" + y_label + "</text>\n";

  for (size_t s = 0; s < series.size(); ++s) {
    std::string points;
    for (size_t t = 0; t < series[s].values.size(); ++t) {
      points += num(sx((double)(t + 1))) + "," + num(sy(series[s].values[t])) + " ";
    }
    out += "<polyline fill=\"none\" stroke=\"" + std::string(series_color(s)) +
           "\" stroke-width=\"1.8\" points=\"" + points + "\"/>\n";
    const double ly = top + 16 + 18 * (double)s;
    out += "<line x1=\"" + num(width - right + 10) + "\" y1=\"" + num(ly - 4) + "\" x2=\"" +
           num(width - right + 34) + "\" y2=\"" + num(ly - 4) + "\" stroke=\"" +
           series_color(s) + "\" stroke-width=\"1.8\"/>\n";
    out += "<text x=\"" + num(width - right + 40) + "\" y=\"" + num(ly) +
           "\" font-size=\"12\" font-family=\"sans-serif\">" + series[s].label + "</text>\n";
  }
  out += "</svg>\n";
  return out;
}

struct Bar {
  std::string label;
  double value = 0.0;
  double error = 0.0;
};

inline std::string bar_chart(const std::string& title, const std::string& y_label,
                             const std::vector<Bar>& bars) {
  const double width = 520, height = 400;
  const double left = 70, right = 30, top = 50, bottom = 60;
  const double plot_w = width - left - right, plot_h = height - top - bottom;

  double y_min = 0.0, y_max = 0.0;
  for (const auto& b : bars) {
    y_min = std::min(y_min, b.value - b.error);
    y_max = std::max(y_max, b.value + b.error);
  }
  const double pad = std::max(0.05, 0.15 * (y_max - y_min));
  y_min -= pad;
  y_max += pad;
  auto sy = [&](double v) { return top + (y_max - v) / (y_max - y_min) * plot_h; };

  std::string out;
  out += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + num(width) + "\" height=\"" +
         num(height) + "\">\n";
  out += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  out += "<text x=\"" + num(width / 2) + "\" y=\"24\" text-anchor=\"middle\" font-size=\"15\" "
         "font-family=\"sans-serif\">" + title + "</text>\n";
  out += "<rect x=\"" + num(left) + "\" y=\"" + num(top) + "\" width=\"" + num(plot_w) +
         "\" height=\"" + num(plot_h) + "\" fill=\"none\" stroke=\"#333\"/>\n";
  for (int t = 0; t <= 4; ++t) {
    const double v = y_min + t * (y_max - y_min) / 4;
    out += "<text x=\"" + num(left - 8) + "\" y=\"" + num(sy(v) + 4) +
           "\" text-anchor=\"end\" font-size=\"11\" font-family=\"sans-serif\">" + num(v) +
           "</text>\n";
  }
  if (y_min < 0 && y_max > 0)
    out += "<line x1=\"" + num(left) + "\" y1=\"" + num(sy(0)) + "\" x2=\"" +
           num(left + plot_w) + "\" y2=\"" + num(sy(0)) + "\" stroke=\"#999\" "
           "stroke-dasharray=\"4 3\"/>\n";

  const double slot = plot_w / (double)bars.size();
  for (size_t i = 0; i < bars.size(); ++i) {
    const double cx = left + slot * ((double)i + 0.5);
    const double w = slot * 0.5;
    const double base = sy(std::max(0.0, y_min));
    const double yv = sy(bars[i].value);
    out += "<rect x=\"" + num(cx - w / 2) + "\" y=\"" + num(std::min(yv, base)) + "\" width=\"" +
           num(w) + "\" height=\"" + num(std::abs(base - yv)) + "\" fill=\"" +
           series_color(i) + "\" fill-opacity=\"0.85\"/>\n";
    out += "<line x1=\"" + num(cx) + "\" y1=\"" + num(sy(bars[i].value - bars[i].error)) +
           "\" x2=\"" + num(cx) + "\" y2=\"" + num(sy(bars[i].value + bars[i].error)) +
           "\" stroke=\"#222\"/>\n";
    out += "<text x=\"" + num(cx) + "\" y=\"" + num(height - 30) +
           "\" text-anchor=\"middle\" font-size=\"12\" font-family=\"sans-serif\">" +
           bars[i].label + "</text>\n";
  }
  out += "<text x=\"18\" y=\"" + num(top + plot_h / 2) +
         "\" text-anchor=\"middle\" font-size=\"12\" font-family=\"sans-serif\" "
         "transform=\"rotate(-90 18 " + num(top + plot_h / 2) + ")\">" + y_label + "</text>\n";
  out += "</svg>\n";
  return out;
}

// Two side-by-side heatmaps sharing a grid; values colored by sign and
// magnitude scaled per panel.
inline std::string heatmap_pair(const std::string& title_left, const std::string& title_right,
                                int resolution, const std::vector<double>& left_values,
                                const std::vector<double>& right_values, double x_min,
                                double x_max, double y_min, double y_max) {
  const double cell = std::max(2.0, 360.0 / resolution);
  const double panel = cell * resolution;
  const double margin = 45, gap = 40;
  const double width = margin * 2 + panel * 2 + gap;
  const double height = margin + panel + 55;

  auto panel_svg = [&](double x0, const std::string& title, const std::vector<double>& values) {
    double scale = 0.0;
    for (double v : values) scale = std::max(scale, std::abs(v));
    if (scale == 0.0) scale = 1.0;
    std::string out;
    out += "<text x=\"" + num(x0 + panel / 2) + "\" y=\"" + num(margin - 12) +
           "\" text-anchor=\"middle\" font-size=\"14\" font-family=\"sans-serif\">" + title +
           "</text>\n";
    for (int r = 0; r < resolution; ++r) {
      for (int c = 0; c < resolution; ++c) {
        const double v = values[static_cast<size_t>(r) * resolution + c] / scale;
        // row 0 is the lowest y value; flip so +y points up
        const double px = x0 + c * cell;
        const double py = margin + (resolution - 1 - r) * cell;
        out += "<rect x=\"" + num(px) + "\" y=\"" + num(py) + "\" width=\"" + num(cell + 0.5) +
               "\" height=\"" + num(cell + 0.5) + "\" fill=\"" + diverging_color(v) + "\"/>\n";
      }
    }
    out += "<rect x=\"" + num(x0) + "\" y=\"" + num(margin) + "\" width=\"" + num(panel) +
           "\" height=\"" + num(panel) + "\" fill=\"none\" stroke=\"#333\"/>\n";
    out += "<text x=\"" + num(x0) + "\" y=\"" + num(margin + panel + 16) +
           "\" font-size=\"10\" font-family=\"sans-serif\">" + num(x_min) + "</text>\n";
    out += "<text x=\"" + num(x0 + panel) + "\" y=\"" + num(margin + panel + 16) +
           "\" text-anchor=\"end\" font-size=\"10\" font-family=\"sans-serif\">" + num(x_max) +
           "</text>\n";
    out += "<text x=\"" + num(x0 - 4) + "\" y=\"" + num(margin + panel) +
           "\" text-anchor=\"end\" font-size=\"10\" font-family=\"sans-serif\">" + num(y_min) +
           "</text>\n";
    out += "<text x=\"" + num(x0 - 4) + "\" y=\"" + num(margin + 10) +
           "\" text-anchor=\"end\" font-size=\"10\" font-family=\"sans-serif\">" + num(y_max) +
           "</text>\n";
    return out;
  };

  std::string out;
  out += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + num(width) + "\" height=\"" +
         num(height) + "\">\n";
  out += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  out += panel_svg(margin, title_left, left_values);
  out += panel_svg(margin + panel + gap, title_right, right_values);
  out += "</svg>\n";
  return out;
}

}  // namespace cli::svg
