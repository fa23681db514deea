// Copyright 2026 The DGform Authors
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

#include "dgform/cli/plot.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

namespace dgform {
namespace {

constexpr double kWidth = 640.0;
constexpr double kHeight = 400.0;
constexpr double kLeft = 70.0;
constexpr double kRight = 20.0;
constexpr double kTop = 40.0;
constexpr double kBottom = 60.0;

const char* const kPalette[] = {"#4e79a7", "#f28e2b", "#e15759", "#76b7b2",
                                "#59a14f", "#edc948", "#b07aa1", "#ff9da7"};

std::string Num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.4g", v);
  return buf;
}

std::string Escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '&': out += "&amp;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

struct Range {
  double lo = 0.0;
  double hi = 1.0;

  void Include(double v) {
    if (!std::isfinite(v)) return;
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  void Pad() {
    if (hi - lo < 1e-12) {
      hi += 0.5;
      lo -= 0.5;
    }
  }
};

double MapY(double v, const Range& r) {
  return kTop + (kHeight - kTop - kBottom) * (r.hi - v) / (r.hi - r.lo);
}

double MapX(double v, const Range& r) {
  return kLeft + (kWidth - kLeft - kRight) * (v - r.lo) / (r.hi - r.lo);
}

std::string Frame(const std::string& title, const Range& y) {
  std::string s = "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + Num(kWidth) +
                  "\" height=\"" + Num(kHeight) + "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  s += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  s += "<text x=\"" + Num(kWidth / 2) + "\" y=\"24\" text-anchor=\"middle\" font-size=\"15\">" +
       Escape(title) + "</text>\n";
  for (int i = 0; i <= 4; ++i) {
    const double v = y.lo + (y.hi - y.lo) * i / 4.0;
    const double py = MapY(v, y);
    s += "<line x1=\"" + Num(kLeft) + "\" y1=\"" + Num(py) + "\" x2=\"" + Num(kWidth - kRight) +
         "\" y2=\"" + Num(py) + "\" stroke=\"#ddd\"/>\n";
    s += "<text x=\"" + Num(kLeft - 6) + "\" y=\"" + Num(py + 4) + "\" text-anchor=\"end\">" +
         Num(v) + "</text>\n";
  }
  s += "<line x1=\"" + Num(kLeft) + "\" y1=\"" + Num(kTop) + "\" x2=\"" + Num(kLeft) + "\" y2=\"" +
       Num(kHeight - kBottom) + "\" stroke=\"black\"/>\n";
  return s;
}

}  // namespace

std::string BarChartSvg(const std::string& title, const std::vector<Bar>& bars) {
  Range y;
  for (const Bar& b : bars) {
    y.Include(b.mean + b.spread);
    y.Include(b.mean - b.spread);
  }
  y.Pad();
  std::string s = Frame(title, y);
  const double slot = (kWidth - kLeft - kRight) / std::max<size_t>(1, bars.size());
  const double zero = MapY(0.0, y);
  for (size_t i = 0; i < bars.size(); ++i) {
    const Bar& b = bars[i];
    const double cx = kLeft + slot * (i + 0.5);
    const double top = MapY(b.mean, y);
    s += "<rect x=\"" + Num(cx - slot * 0.3) + "\" y=\"" + Num(std::min(top, zero)) +
         "\" width=\"" + Num(slot * 0.6) + "\" height=\"" + Num(std::abs(zero - top)) +
         "\" fill=\"" + kPalette[i % 8] + "\"/>\n";
    if (b.spread > 0) {
      s += "<line x1=\"" + Num(cx) + "\" y1=\"" + Num(MapY(b.mean - b.spread, y)) + "\" x2=\"" +
           Num(cx) + "\" y2=\"" + Num(MapY(b.mean + b.spread, y)) + "\" stroke=\"black\"/>\n";
    }
    s += "<text x=\"" + Num(cx) + "\" y=\"" + Num(kHeight - kBottom + 18) +
         "\" text-anchor=\"middle\">" + Escape(b.label) + "</text>\n";
  }
  s += "<line x1=\"" + Num(kLeft) + "\" y1=\"" + Num(zero) + "\" x2=\"" + Num(kWidth - kRight) +
       "\" y2=\"" + Num(zero) + "\" stroke=\"black\"/>\n";
  return s + "</svg>\n";
}

std::string LineChartSvg(const std::string& title, const std::string& x_label,
                         const std::vector<Series>& series) {
  Range x{std::numeric_limits<double>::max(), std::numeric_limits<double>::lowest()};
  Range y;
  for (const Series& ser : series) {
    for (double v : ser.x) x.Include(v);
    for (double v : ser.y) y.Include(v);
  }
  if (x.lo > x.hi) x = Range{};
  x.Pad();
  y.Pad();
  std::string s = Frame(title, y);
  for (size_t k = 0; k < series.size(); ++k) {
    const Series& ser = series[k];
    std::string points;
    for (size_t i = 0; i < std::min(ser.x.size(), ser.y.size()); ++i) {
      if (!std::isfinite(ser.y[i])) continue;
      points += Num(MapX(ser.x[i], x)) + "," + Num(MapY(ser.y[i], y)) + " ";
    }
    s += "<polyline fill=\"none\" stroke=\"" + std::string(kPalette[k % 8]) +
         "\" stroke-width=\"1.5\" points=\"" + points + "\"/>\n";
    s += "<text x=\"" + Num(kWidth - kRight - 4) + "\" y=\"" + Num(kTop + 14 * (k + 1)) +
         "\" text-anchor=\"end\" fill=\"" + kPalette[k % 8] + "\">" + Escape(ser.label) +
         "</text>\n";
  }
  s += "<text x=\"" + Num(kLeft) + "\" y=\"" + Num(kHeight - kBottom + 18) + "\">" + Num(x.lo) +
       "</text>\n";
  s += "<text x=\"" + Num(kWidth - kRight) + "\" y=\"" + Num(kHeight - kBottom + 18) +
       "\" text-anchor=\"end\">" + Num(x.hi) + "</text>\n";
  s += "<text x=\"" + Num((kWidth + kLeft) / 2) + "\" y=\"" + Num(kHeight - 16) +
       "\" text-anchor=\"middle\">" + Escape(x_label) + "</text>\n";
  return s + "</svg>\n";
}

}  // namespace dgform
