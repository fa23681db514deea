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

#ifndef DGFORM_PERCEPT_GRAPH_H_
#define DGFORM_PERCEPT_GRAPH_H_

#include <array>
#include <cstdint>
#include <utility>
#include <vector>

#include "dgform/env/types.h"

namespace dgform {

struct ColorBounds {
  std::array<std::uint8_t, 3> lo{};
  std::array<std::uint8_t, 3> hi{};

  // Symmetric box of half-width `tolerance` around `color`.
  static ColorBounds Around(const std::array<std::uint8_t, 3>& color,
                            int tolerance);
  bool Contains(const std::uint8_t* rgb) const;
};

ColorBounds DoughColorBounds();

struct SegMask {
  int height = 0;
  int width = 0;
  std::vector<std::uint8_t> cells;

  SegMask() = default;
  SegMask(int h, int w) : height(h), width(w), cells(h * w, 0) {}
  bool at(int row, int col) const { return cells[row * width + col] != 0; }
  void set(int row, int col, bool v = true) { cells[row * width + col] = v; }
  bool Inside(int row, int col) const {
    return row >= 0 && row < height && col >= 0 && col < width;
  }
  int Count() const;
  bool operator==(const SegMask&) const = default;
};

// x is the column, y the row; pixel centers sit on integers.
struct PixelPoint {
  double x = 0.0;
  double y = 0.0;
  bool operator==(const PixelPoint&) const = default;
};

struct BoundaryPoint {
  PixelPoint point;
  bool clipped = false;
};

inline constexpr int kBoundaryNodes = 8;
inline constexpr int kObjectNodes = kBoundaryNodes + 1;
inline constexpr int kObjectEdges = 2 * kBoundaryNodes;
inline constexpr int kManipulatorNodes = 2;

// Color threshold followed by the largest 8-connected component.
// Throws EmptySegmentation when nothing matches.
SegMask Segment(const RgbdObs& obs, const ColorBounds& bounds);

// Mean pixel coordinate of the mask. ContractError on an empty mask.
PixelPoint ContourCenter(const SegMask& mask);

// Farthest mask point along rays at k*45 degrees from the board +x axis
// (image rows grow toward board -y).
std::array<BoundaryPoint, kBoundaryNodes> RayBoundaryPoints(
    const SegMask& mask, const PixelPoint& center);

// Maps between image pixels and the board frame, camera looking straight down
// at the board center.
struct CameraFrame {
  int height = 128;
  int width = 128;
  double board_size = 0.4;

  std::pair<double, double> PixelToBoard(const PixelPoint& p) const;
  PixelPoint BoardToPixel(double x, double y) const;
};

struct ObjectNode {
  double x = 0.0;
  double y = 0.0;
  double depth = 0.0;
  bool operator==(const ObjectNode&) const = default;
};

struct ObjectSubgraph {
  std::array<ObjectNode, kObjectNodes> nodes{};  // 0 = center

  // Star edges (0, i) then ring edges (i, i % 8 + 1), i = 1..8.
  static const std::vector<std::pair<int, int>>& Edges();
  bool operator==(const ObjectSubgraph&) const = default;
};

ObjectSubgraph BuildObjectSubgraph(
    const PixelPoint& center,
    const std::array<BoundaryPoint, kBoundaryNodes>& points,
    const RgbdObs& obs, const CameraFrame& frame);

enum class NodeType { kObject, kManipulator };
enum class EdgeType { kObjectObject, kManipulatorObject };

struct TypedEdge {
  EdgeType type;
  int src;  // global node index: objects first, then manipulators
  int dst;
  bool operator==(const TypedEdge&) const = default;
};

struct HeteroGraph {
  ObjectSubgraph object;
  std::array<EePose, kManipulatorNodes> manipulators{};

  static constexpr int kNumNodes = kObjectNodes + kManipulatorNodes;
  static NodeType TypeOf(int node) {
    return node < kObjectNodes ? NodeType::kObject : NodeType::kManipulator;
  }
  // 16 object edges followed by 18 manipulator-object edges.
  std::vector<TypedEdge> Edges() const;
  bool operator==(const HeteroGraph&) const = default;
};

// ContractError when a pose is not finite.
HeteroGraph BuildHeteroGraph(const ObjectSubgraph& sub,
                             const BimanualPose& poses);

struct AbstractionResult {
  ObjectSubgraph subgraph;
  PixelPoint center;
  std::array<BoundaryPoint, kBoundaryNodes> boundary{};
};

// Full observation-to-subgraph pipeline.
AbstractionResult Abstract(const RgbdObs& obs, const ColorBounds& bounds,
                           double board_size);

}  // namespace dgform

#endif  // DGFORM_PERCEPT_GRAPH_H_
