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
#include <cmath>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

namespace uplin {

struct PlotSeries {
  std::string label;
  std::vector<double> xs;
  std::vector<double> ys;
  std::string color = "#1f77b4";
  bool dashed = false;
};

/// Minimal line chart with linear axes, five ticks per axis and a legend.
inline std::string render_line_plot(const std::vector<PlotSeries>& series,
                                    const std::string& title,
                                    const std::string& xlabel,
                                    const std::string& ylabel) {
  constexpr double kW = 720, kH = 460, kL = 80, kR = 20, kT = 40, kB = 60;
  double x0 = std::numeric_limits<double>::infinity(), x1 = -x0;
  double y0 = x0, y1 = -x0;
  for (const auto& s : series) {
    for (double v : s.xs) x0 = std::min(x0, v), x1 = std::max(x1, v);
    for (double v : s.ys)
      if (std::isfinite(v)) y0 = std::min(y0, v), y1 = std::max(y1, v);
  }
  if (!(x1 > x0)) x0 -= 1, x1 += 1;
  if (!(y1 > y0)) y0 -= 1, y1 += 1;
  const double pad = 0.05 * (y1 - y0);
  y0 -= pad;
  y1 += pad;
  auto px = [&](double x) { return kL + (x - x0) / (x1 - x0) * (kW - kL - kR); };
  auto py = [&](double y) { return kH - kB - (y - y0) / (y1 - y0) * (kH - kT - kB); };

  std::ostringstream os;
  os.precision(6);
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kW
     << "\" height=\"" << kH << "\" font-family=\"sans-serif\" font-size=\"12\">\n"
     << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
     << "<text x=\"" << kW / 2 << "\" y=\"24\" text-anchor=\"middle\" font-size=\"15\">"
     << title << "</text>\n";
  os << "<line x1=\"" << kL << "\" y1=\"" << kH - kB << "\" x2=\"" << kW - kR
     << "\" y2=\"" << kH - kB << "\" stroke=\"black\"/>\n"
     << "<line x1=\"" << kL << "\" y1=\"" << kT << "\" x2=\"" << kL << "\" y2=\""
     << kH - kB << "\" stroke=\"black\"/>\n";
  for (int i = 0; i <= 4; ++i) {
    const double xv = x0 + (x1 - x0) * i / 4.0;
    const double yv = y0 + (y1 - y0) * i / 4.0;
    os << "<text x=\"" << px(xv) << "\" y=\"" << kH - kB + 18
       << "\" text-anchor=\"middle\">" << xv << "</text>\n"
       << "<text x=\"" << kL - 6 << "\" y=\"" << py(yv) + 4
       << "\" text-anchor=\"end\">" << yv << "</text>\n";
  }
  os << "<text x=\"" << kW / 2 << "\" y=\"" << kH - 15
     << "\" text-anchor=\"middle\">" << xlabel << "</text>\n"
     << "<text transform=\"translate(18," << kH / 2
     << ") rotate(-90)\" text-anchor=\"middle\">" << ylabel << "</text>\n";
  if (y0 < 0 && y1 > 0)
    os << "<line x1=\"" << kL << "\" y1=\"" << py(0) << "\" x2=\"" << kW - kR
       << "\" y2=\"" << py(0) << "\" stroke=\"#bbb\"/>\n";
  for (std::size_t s = 0; s < series.size(); ++s) {
    const auto& ser = series[s];
    os << "<polyline fill=\"none\" stroke=\"" << ser.color << "\" stroke-width=\"1.5\""
       << (ser.dashed ? " stroke-dasharray=\"6,4\"" : "") << " points=\"";
    for (std::size_t i = 0; i < ser.xs.size() && i < ser.ys.size(); ++i)
      if (std::isfinite(ser.ys[i])) os << px(ser.xs[i]) << "," << py(ser.ys[i]) << " ";
    os << "\"/>\n";
    const double ly = kT + 14 + 16 * static_cast<double>(s);
    os << "<line x1=\"" << kL + 12 << "\" y1=\"" << ly - 4 << "\" x2=\"" << kL + 36
       << "\" y2=\"" << ly - 4 << "\" stroke=\"" << ser.color << "\""
       << (ser.dashed ? " stroke-dasharray=\"6,4\"" : "") << "/>\n"
       << "<text x=\"" << kL + 42 << "\" y=\"" << ly << "\">" << ser.label << "</text>\n";
  }
  os << "</svg>\n";
  return os.str();
}

}  // namespace uplin
