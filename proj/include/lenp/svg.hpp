// Copyright 2026 The Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <algorithm>
#include <cstdio>
#include <string>
#include <vector>

#include "lenp/errors.hpp"

namespace lenp {

struct SvgSeries {
  std::string label;
  std::vector<double> values;  // plotted against their index
};

struct SvgBar {
  std::string label;
  double value = 0.0;
  double ci = 0.0;  // half-width whisker; 0 disables
};

namespace detail {

inline const char* svg_color(std::size_t i) {
  static const char* palette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e"};
  return palette[i % 5];
}

inline std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4g", v);
  return buf;
}

struct SvgFrame {
  static constexpr double kWidth = 640, kHeight = 420;
  static constexpr double kLeft = 64, kRight = 24, kTop = 44, kBottom = 52;
  double y_max = 1.0;

  double plot_w() const { return kWidth - kLeft - kRight; }
  double plot_h() const { return kHeight - kTop - kBottom; }
  double ty(double v) const { return kTop + plot_h() * (1.0 - v / y_max); }

  std::string open(const std::string& title, const std::string& y_label) const {
    std::string s = "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"0 0 " + fmt(kWidth) +
                    " " + fmt(kHeight) + "\" font-family=\"sans-serif\" font-size=\"12\">\n";
    s += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    s += "<text x=\"" + fmt(kWidth / 2) + "\" y=\"22\" text-anchor=\"middle\" font-size=\"15\">" +
         title + "</text>\n";
    s += "<text x=\"16\" y=\"" + fmt(kTop + plot_h() / 2) + "\" text-anchor=\"middle\" " +
         "transform=\"rotate(-90 16 " + fmt(kTop + plot_h() / 2) + ")\">" + y_label +
         "</text>\n";
    // Axes and horizontal ticks.
    s += "<line x1=\"" + fmt(kLeft) + "\" y1=\"" + fmt(kTop) + "\" x2=\"" + fmt(kLeft) +
         "\" y2=\"" + fmt(kTop + plot_h()) + "\" stroke=\"black\"/>\n";
    s += "<line x1=\"" + fmt(kLeft) + "\" y1=\"" + fmt(kTop + plot_h()) + "\" x2=\"" +
         fmt(kLeft + plot_w()) + "\" y2=\"" + fmt(kTop + plot_h()) + "\" stroke=\"black\"/>\n";
    for (int t = 0; t <= 4; ++t) {
      const double v = y_max * t / 4.0;
      s += "<line x1=\"" + fmt(kLeft - 4) + "\" y1=\"" + fmt(ty(v)) + "\" x2=\"" +
           fmt(kLeft + plot_w()) + "\" y2=\"" + fmt(ty(v)) +
           "\" stroke=\"#dddddd\" stroke-width=\"0.7\"/>\n";
      s += "<text x=\"" + fmt(kLeft - 8) + "\" y=\"" + fmt(ty(v) + 4) +
           "\" text-anchor=\"end\">" + fmt(v) + "</text>\n";
    }
    return s;
  }
};

}  // namespace detail

// Multi-series line chart; x is the sample index of each series value.
inline std::string svg_line_chart(const std::string& title, const std::string& x_label,
                                  const std::string& y_label,
                                  const std::vector<SvgSeries>& series) {
  if (series.empty()) throw UsageError("svg: no series to plot");
  std::size_t n = 0;
  double top = 0.0;
  for (const auto& s : series) {
    n = std::max(n, s.values.size());
    for (double v : s.values) top = std::max(top, v);
  }
  if (n < 2) throw UsageError("svg: series need at least two points");

  detail::SvgFrame frame;
  frame.y_max = top <= 1.0 ? 1.0 : top * 1.05;
  std::string s = frame.open(title, y_label);
  const double step = frame.plot_w() / static_cast<double>(n - 1);
  for (std::size_t k = 0; k < n; ++k) {
    const double x = detail::SvgFrame::kLeft + step * static_cast<double>(k);
    s += "<text x=\"" + detail::fmt(x) + "\" y=\"" +
         detail::fmt(detail::SvgFrame::kTop + frame.plot_h() + 16) +
         "\" text-anchor=\"middle\">" + std::to_string(k) + "</text>\n";
  }
  s += "<text x=\"" + detail::fmt(detail::SvgFrame::kLeft + frame.plot_w() / 2) + "\" y=\"" +
       detail::fmt(detail::SvgFrame::kHeight - 12) + "\" text-anchor=\"middle\">" + x_label +
       "</text>\n";

  for (std::size_t i = 0; i < series.size(); ++i) {
    std::string points;
    for (std::size_t k = 0; k < series[i].values.size(); ++k) {
      points += detail::fmt(detail::SvgFrame::kLeft + step * static_cast<double>(k)) + "," +
                detail::fmt(frame.ty(series[i].values[k])) + " ";
    }
    s += "<polyline fill=\"none\" stroke=\"" + std::string(detail::svg_color(i)) +
         "\" stroke-width=\"1.8\" points=\"" + points + "\"/>\n";
    const double ly = detail::SvgFrame::kTop + 14.0 * static_cast<double>(i) + 4;
    const double lx = detail::SvgFrame::kLeft + frame.plot_w() - 140;
    s += "<line x1=\"" + detail::fmt(lx) + "\" y1=\"" + detail::fmt(ly) + "\" x2=\"" +
         detail::fmt(lx + 22) + "\" y2=\"" + detail::fmt(ly) + "\" stroke=\"" +
         detail::svg_color(i) + "\" stroke-width=\"1.8\"/>\n";
    s += "<text x=\"" + detail::fmt(lx + 28) + "\" y=\"" + detail::fmt(ly + 4) + "\">" +
         series[i].label + "</text>\n";
  }
  return s + "</svg>\n";
}

// Bar chart with optional 95% CI whiskers.
inline std::string svg_bar_chart(const std::string& title, const std::string& y_label,
                                 const std::vector<SvgBar>& bars) {
  if (bars.empty()) throw UsageError("svg: no bars to plot");
  detail::SvgFrame frame;
  double top = 0.0;
  for (const auto& b : bars) top = std::max(top, b.value + b.ci);
  frame.y_max = top <= 1.0 ? 1.0 : top * 1.05;

  std::string s = frame.open(title, y_label);
  const double slot = frame.plot_w() / static_cast<double>(bars.size());
  for (std::size_t i = 0; i < bars.size(); ++i) {
    const double cx = detail::SvgFrame::kLeft + slot * (static_cast<double>(i) + 0.5);
    const double w = slot * 0.55;
    const double y = frame.ty(bars[i].value);
    s += "<rect x=\"" + detail::fmt(cx - w / 2) + "\" y=\"" + detail::fmt(y) + "\" width=\"" +
         detail::fmt(w) + "\" height=\"" +
         detail::fmt(detail::SvgFrame::kTop + frame.plot_h() - y) + "\" fill=\"" +
         detail::svg_color(i) + "\"/>\n";
    if (bars[i].ci > 0) {
      const double y1 = frame.ty(std::max(0.0, bars[i].value - bars[i].ci));
      const double y2 = frame.ty(std::min(frame.y_max, bars[i].value + bars[i].ci));
      s += "<line x1=\"" + detail::fmt(cx) + "\" y1=\"" + detail::fmt(y1) + "\" x2=\"" +
           detail::fmt(cx) + "\" y2=\"" + detail::fmt(y2) +
           "\" stroke=\"black\" stroke-width=\"1.4\"/>\n";
      for (double yy : {y1, y2}) {
        s += "<line x1=\"" + detail::fmt(cx - 5) + "\" y1=\"" + detail::fmt(yy) + "\" x2=\"" +
             detail::fmt(cx + 5) + "\" y2=\"" + detail::fmt(yy) +
             "\" stroke=\"black\" stroke-width=\"1.4\"/>\n";
      }
    }
    s += "<text x=\"" + detail::fmt(cx) + "\" y=\"" +
         detail::fmt(detail::SvgFrame::kTop + frame.plot_h() + 16) +
         "\" text-anchor=\"middle\">" + bars[i].label + "</text>\n";
    s += "<text x=\"" + detail::fmt(cx) + "\" y=\"" + detail::fmt(y - 6) +
         "\" text-anchor=\"middle\">" + detail::fmt(bars[i].value) + "</text>\n";
  }
  return s + "</svg>\n";
}

}  // namespace lenp
