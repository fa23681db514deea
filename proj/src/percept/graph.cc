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

#include "dgform/percept/graph.h"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "dgform/common/error.h"
#include "dgform/env/dough_env.h"

namespace dgform {
namespace {

constexpr double kRayStep = 0.05;

int Round(double v) { return static_cast<int>(std::floor(v + 0.5)); }

// Mask as a continuous field; its 0.5 level set is the sub-pixel boundary.
double Bilinear(const SegMask& mask, double x, double y) {
  const int c0 = std::min(static_cast<int>(x), mask.width - 2);
  const int r0 = std::min(static_cast<int>(y), mask.height - 2);
  const double fx = x - c0;
  const double fy = y - r0;
  return (1 - fy) * ((1 - fx) * mask.at(r0, c0) + fx * mask.at(r0, c0 + 1)) +
         fy * ((1 - fx) * mask.at(r0 + 1, c0) + fx * mask.at(r0 + 1, c0 + 1));
}

}  // namespace

ColorBounds ColorBounds::Around(const std::array<std::uint8_t, 3>& color,
                                int tolerance) {
  ColorBounds b;
  for (int i = 0; i < 3; ++i) {
    b.lo[i] = static_cast<std::uint8_t>(std::clamp(color[i] - tolerance, 0, 255));
    b.hi[i] = static_cast<std::uint8_t>(std::clamp(color[i] + tolerance, 0, 255));
  }
  return b;
}

bool ColorBounds::Contains(const std::uint8_t* rgb) const {
  for (int i = 0; i < 3; ++i) {
    if (rgb[i] < lo[i] || rgb[i] > hi[i]) return false;
  }
  return true;
}

ColorBounds DoughColorBounds() { return ColorBounds::Around(kDoughColor, 25); }

int SegMask::Count() const {
  return static_cast<int>(std::count(cells.begin(), cells.end(), 1));
}

SegMask Segment(const RgbdObs& obs, const ColorBounds& bounds) {
  if (obs.height <= 0 || obs.width <= 0 ||
      obs.rgb.size() != static_cast<size_t>(obs.height * obs.width * 3)) {
    throw ContractError("segment: malformed image");
  }
  SegMask raw(obs.height, obs.width);
  for (int r = 0; r < obs.height; ++r) {
    for (int c = 0; c < obs.width; ++c) {
      raw.set(r, c, bounds.Contains(obs.pixel(r, c)));
    }
  }
  // Label 8-connected components, keep the largest (first in raster order on
  // ties).
  std::vector<int> label(raw.cells.size(), -1);
  std::vector<int> stack;
  int best_label = -1;
  int best_size = 0;
  int next = 0;
  for (int start = 0; start < static_cast<int>(raw.cells.size()); ++start) {
    if (!raw.cells[start] || label[start] >= 0) continue;
    int size = 0;
    label[start] = next;
    stack.push_back(start);
    while (!stack.empty()) {
      const int idx = stack.back();
      stack.pop_back();
      ++size;
      const int r = idx / raw.width;
      const int c = idx % raw.width;
      for (int dr = -1; dr <= 1; ++dr) {
        for (int dc = -1; dc <= 1; ++dc) {
          const int nr = r + dr;
          const int nc = c + dc;
          if (!raw.Inside(nr, nc)) continue;
          const int n = nr * raw.width + nc;
          if (raw.cells[n] && label[n] < 0) {
            label[n] = next;
            stack.push_back(n);
          }
        }
      }
    }
    if (size > best_size) {
      best_size = size;
      best_label = next;
    }
    ++next;
  }
  if (best_label < 0) throw EmptySegmentation("segment: no dough pixels");
  SegMask mask(obs.height, obs.width);
  for (size_t i = 0; i < label.size(); ++i) mask.cells[i] = label[i] == best_label;
  return mask;
}

PixelPoint ContourCenter(const SegMask& mask) {
  double sx = 0.0;
  double sy = 0.0;
  long n = 0;
  for (int r = 0; r < mask.height; ++r) {
    for (int c = 0; c < mask.width; ++c) {
      if (!mask.at(r, c)) continue;
      sx += c;
      sy += r;
      ++n;
    }
  }
  if (n == 0) throw ContractError("contour_center: empty mask");
  return {sx / n, sy / n};
}

std::array<BoundaryPoint, kBoundaryNodes> RayBoundaryPoints(
    const SegMask& mask, const PixelPoint& center) {
  std::array<BoundaryPoint, kBoundaryNodes> out;
  for (int k = 0; k < kBoundaryNodes; ++k) {
    const double angle = k * std::numbers::pi / 4.0;
    const double dx = std::cos(angle);
    const double dy = -std::sin(angle);
    double last_t = 0.0;
    bool last_inside = false;
    for (int i = 0;; ++i) {
      const double t = i * kRayStep;
      const double x = center.x + t * dx;
      const double y = center.y + t * dy;
      if (x < 0.0 || y < 0.0 || x > mask.width - 1 || y > mask.height - 1) break;
      last_inside = Bilinear(mask, x, y) >= 0.5;
      if (last_inside) last_t = t;
    }
    out[k].point = {center.x + last_t * dx, center.y + last_t * dy};
    out[k].clipped = last_inside;
  }
  return out;
}

std::pair<double, double> CameraFrame::PixelToBoard(const PixelPoint& p) const {
  const double half = 0.5 * board_size;
  return {-half + (p.x + 0.5) * board_size / width,
          half - (p.y + 0.5) * board_size / height};
}

PixelPoint CameraFrame::BoardToPixel(double x, double y) const {
  const double half = 0.5 * board_size;
  return {(x + half) * width / board_size - 0.5,
          (half - y) * height / board_size - 0.5};
}

const std::vector<std::pair<int, int>>& ObjectSubgraph::Edges() {
  static const std::vector<std::pair<int, int>> edges = [] {
    std::vector<std::pair<int, int>> e;
    for (int i = 1; i <= kBoundaryNodes; ++i) e.emplace_back(0, i);
    for (int i = 1; i <= kBoundaryNodes; ++i) {
      e.emplace_back(i, i % kBoundaryNodes + 1);
    }
    return e;
  }();
  return edges;
}

namespace {

double MedianDepth(const RgbdObs& obs, const PixelPoint& p) {
  const int r0 = std::clamp(Round(p.y), 0, obs.height - 1);
  const int c0 = std::clamp(Round(p.x), 0, obs.width - 1);
  std::array<double, 9> window;
  int n = 0;
  for (int dr = -1; dr <= 1; ++dr) {
    for (int dc = -1; dc <= 1; ++dc) {
      const int r = std::clamp(r0 + dr, 0, obs.height - 1);
      const int c = std::clamp(c0 + dc, 0, obs.width - 1);
      window[n++] = obs.depth_at(r, c);
    }
  }
  std::nth_element(window.begin(), window.begin() + 4, window.end());
  return window[4];
}

}  // namespace

ObjectSubgraph BuildObjectSubgraph(
    const PixelPoint& center,
    const std::array<BoundaryPoint, kBoundaryNodes>& points,
    const RgbdObs& obs, const CameraFrame& frame) {
  if (obs.depth.size() != static_cast<size_t>(obs.height * obs.width)) {
    throw ContractError("build_object_subgraph: malformed depth image");
  }
  ObjectSubgraph sub;
  auto fill = [&](ObjectNode& node, const PixelPoint& p) {
    std::tie(node.x, node.y) = frame.PixelToBoard(p);
    node.depth = MedianDepth(obs, p);
  };
  fill(sub.nodes[0], center);
  for (int k = 0; k < kBoundaryNodes; ++k) fill(sub.nodes[k + 1], points[k].point);
  return sub;
}

std::vector<TypedEdge> HeteroGraph::Edges() const {
  std::vector<TypedEdge> edges;
  for (const auto& [a, b] : ObjectSubgraph::Edges()) {
    edges.push_back({EdgeType::kObjectObject, a, b});
  }
  for (int m = 0; m < kManipulatorNodes; ++m) {
    for (int o = 0; o < kObjectNodes; ++o) {
      edges.push_back({EdgeType::kManipulatorObject, kObjectNodes + m, o});
    }
  }
  return edges;
}

HeteroGraph BuildHeteroGraph(const ObjectSubgraph& sub,
                             const BimanualPose& poses) {
  for (double v : poses.ToVector()) {
    if (!std::isfinite(v)) {
      throw ContractError("build_hetero_graph: non-finite end-effector pose");
    }
  }
  HeteroGraph g;
  g.object = sub;
  g.manipulators = {poses.left, poses.right};
  return g;
}

AbstractionResult Abstract(const RgbdObs& obs, const ColorBounds& bounds,
                           double board_size) {
  AbstractionResult out;
  const SegMask mask = Segment(obs, bounds);
  out.center = ContourCenter(mask);
  out.boundary = RayBoundaryPoints(mask, out.center);
  out.subgraph = BuildObjectSubgraph(out.center, out.boundary, obs,
                                     {obs.height, obs.width, board_size});
  return out;
}

}  // namespace dgform
