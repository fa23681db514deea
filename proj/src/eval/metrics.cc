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

#include "dgform/eval/metrics.h"

#include <cmath>
#include <limits>

#include "dgform/common/error.h"

namespace dgform {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Stand-in for "no target cell" that keeps the parabola arithmetic finite.
constexpr double kFar = 1e20;

// 1-D squared distance transform of sampled function f (lower envelope of
// parabolas).
void SquaredDistance1d(const std::vector<double>& f, std::vector<double>& d,
                       std::vector<int>& v, std::vector<double>& z) {
  const int n = static_cast<int>(f.size());
  int k = 0;
  v[0] = 0;
  z[0] = -kInf;
  z[1] = kInf;
  for (int q = 1; q < n; ++q) {
    double s = ((f[q] + q * q) - (f[v[k]] + v[k] * v[k])) / (2.0 * (q - v[k]));
    while (s <= z[k]) {
      --k;
      s = ((f[q] + q * q) - (f[v[k]] + v[k] * v[k])) / (2.0 * (q - v[k]));
    }
    ++k;
    v[k] = q;
    z[k] = s;
    z[k + 1] = kInf;
  }
  k = 0;
  for (int q = 0; q < n; ++q) {
    while (z[k + 1] < q) ++k;
    const double dq = q - v[k];
    d[q] = dq * dq + f[v[k]];
  }
}

void CheckSameGrid(const DoughState& state, const GoalSpec& goal) {
  if (state.grid_size != goal.grid_size) {
    throw ShapeError("state and goal grids differ");
  }
}

}  // namespace

int GridMask::Count() const {
  int n = 0;
  for (auto c : cells) n += c != 0;
  return n;
}

GridMask DoughMask(const DoughState& state, double threshold) {
  GridMask mask(state.grid_size, state.grid_size);
  for (size_t i = 0; i < state.heights.size(); ++i) {
    mask.cells[i] = state.heights[i] > threshold ? 1 : 0;
  }
  return mask;
}

GridMask GoalMask(const GoalSpec& goal) {
  GridMask mask(goal.grid_size, goal.grid_size);
  mask.cells = goal.goal_mask;
  return mask;
}

double Iou(const GridMask& a, const GridMask& b) {
  if (a.rows != b.rows || a.cols != b.cols) {
    throw ContractError("iou: mask shapes differ");
  }
  int inter = 0, uni = 0;
  for (size_t i = 0; i < a.cells.size(); ++i) {
    const bool x = a.cells[i] != 0, y = b.cells[i] != 0;
    inter += x && y;
    uni += x || y;
  }
  return uni == 0 ? 1.0 : static_cast<double>(inter) / uni;
}

std::vector<double> DistanceTransform(const GridMask& target) {
  const int rows = target.rows, cols = target.cols;
  std::vector<double> grid(rows * cols);
  for (int i = 0; i < rows * cols; ++i) grid[i] = target.cells[i] ? 0.0 : kFar;
  const int n = std::max(rows, cols);
  std::vector<double> f, d;
  std::vector<int> v(n);
  std::vector<double> z(n + 1);
  // columns
  f.resize(rows);
  d.resize(rows);
  for (int c = 0; c < cols; ++c) {
    for (int r = 0; r < rows; ++r) f[r] = grid[r * cols + c];
    SquaredDistance1d(f, d, v, z);
    for (int r = 0; r < rows; ++r) grid[r * cols + c] = d[r];
  }
  // rows
  f.resize(cols);
  d.resize(cols);
  for (int r = 0; r < rows; ++r) {
    for (int c = 0; c < cols; ++c) f[c] = grid[r * cols + c];
    SquaredDistance1d(f, d, v, z);
    for (int c = 0; c < cols; ++c) {
      grid[r * cols + c] = d[c] >= kFar ? kInf : std::sqrt(d[c]);
    }
  }
  return grid;
}

SdfResult SdfDistance(const DoughState& state, const GoalSpec& goal,
                      double threshold) {
  CheckSameGrid(state, goal);
  const GridMask goal_mask = GoalMask(goal);
  SdfResult result;
  const GridMask current = DoughMask(state, threshold);
  const int count = current.Count();
  if (count == 0) {
    result.empty_current = true;
    return result;
  }
  if (goal_mask.Count() == 0) {
    throw ContractError("sdf: goal mask is empty");
  }
  const std::vector<double> field = DistanceTransform(goal_mask);
  double total = 0.0;
  for (size_t i = 0; i < current.cells.size(); ++i) {
    if (current.cells[i]) total += field[i];
  }
  result.value = total / count * state.cell_size;
  return result;
}

double DensityMetric(const DoughState& state, const GoalSpec& goal) {
  CheckSameGrid(state, goal);
  double total = 0.0;
  for (size_t i = 0; i < state.heights.size(); ++i) {
    total += std::abs(state.heights[i] - goal.goal_heights[i]);
  }
  return total * state.cell_size * state.cell_size;
}

double DensityMetric(const DoughState& a, const DoughState& b) {
  if (a.grid_size != b.grid_size) throw ShapeError("density: grids differ");
  double total = 0.0;
  for (size_t i = 0; i < a.heights.size(); ++i) {
    total += std::abs(a.heights[i] - b.heights[i]);
  }
  return total * a.cell_size * a.cell_size;
}

MetricSnapshot Measure(const DoughState& state, const GoalSpec& goal,
                       double threshold) {
  MetricSnapshot m;
  m.iou = Iou(DoughMask(state, threshold), GoalMask(goal));
  m.sdf = SdfDistance(state, goal, threshold).value;
  m.density = DensityMetric(state, goal);
  return m;
}

}  // namespace dgform
