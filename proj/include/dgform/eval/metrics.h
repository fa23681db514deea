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

#ifndef DGFORM_EVAL_METRICS_H_
#define DGFORM_EVAL_METRICS_H_

#include <cstdint>
#include <vector>

#include "dgform/env/types.h"

namespace dgform {

struct GridMask {
  int rows = 0;
  int cols = 0;
  std::vector<std::uint8_t> cells;

  GridMask() = default;
  GridMask(int r, int c) : rows(r), cols(c), cells(r * c, 0) {}
  bool at(int r, int c) const { return cells[r * cols + c] != 0; }
  void set(int r, int c, bool v = true) { cells[r * cols + c] = v ? 1 : 0; }
  int Count() const;
};

// Cells whose height exceeds threshold count as dough.
GridMask DoughMask(const DoughState& state, double threshold);
GridMask GoalMask(const GoalSpec& goal);

// |a and b| / |a or b|; 1 when both are empty.
double Iou(const GridMask& a, const GridMask& b);

// Exact Euclidean distance (in cells) from every cell to the nearest set cell
// of target; 0 on set cells. Two separable passes of the lower-envelope
// squared-distance transform.
std::vector<double> DistanceTransform(const GridMask& target);

struct SdfResult {
  double value = 0.0;
  bool empty_current = false;  // no dough cells; value forced to 0
};

// Mean goal distance (meters) over current dough cells.
SdfResult SdfDistance(const DoughState& state, const GoalSpec& goal,
                      double threshold);

// Total volume misplacement: sum |h - h_goal| * cell_size^2.
double DensityMetric(const DoughState& state, const GoalSpec& goal);
double DensityMetric(const DoughState& a, const DoughState& b);

struct MetricSnapshot {
  double iou = 0.0;
  double sdf = 0.0;
  double density = 0.0;
};

MetricSnapshot Measure(const DoughState& state, const GoalSpec& goal,
                       double threshold);

struct MetricReport {
  double reward_total = 0.0;
  double iou = 0.0;
  double sdf = 0.0;
  double density = 0.0;
  // one entry per evaluation episode
  std::vector<MetricSnapshot> episodes;
  std::vector<double> episode_rewards;
};

}  // namespace dgform

#endif  // DGFORM_EVAL_METRICS_H_
