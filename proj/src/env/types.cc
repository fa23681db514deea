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

#include "dgform/env/types.h"

#include <algorithm>

#include "dgform/common/error.h"

namespace dgform {

std::array<double, EePose::kDim> EePose::ToArray() const {
  return {position[0],   position[1],   position[2],  quaternion[0],
          quaternion[1], quaternion[2], quaternion[3]};
}

EePose EePose::FromArray(std::span<const double> values) {
  if (values.size() != kDim) throw ShapeError("EePose expects 7 values");
  EePose pose;
  std::copy_n(values.begin(), 3, pose.position.begin());
  std::copy_n(values.begin() + 3, 4, pose.quaternion.begin());
  return pose;
}

std::vector<double> BimanualPose::ToVector() const {
  std::vector<double> out;
  out.reserve(kDim);
  for (double v : left.ToArray()) out.push_back(v);
  for (double v : right.ToArray()) out.push_back(v);
  return out;
}

BimanualPose BimanualPose::FromVector(std::span<const double> values) {
  if (values.size() != kDim) throw ShapeError("BimanualPose expects 14 values");
  return {EePose::FromArray(values.subspan(0, EePose::kDim)),
          EePose::FromArray(values.subspan(EePose::kDim, EePose::kDim))};
}

double DoughState::Volume() const {
  double total = 0.0;
  for (double h : heights) total += h;
  return total * cell_size * cell_size;
}

double DoughState::CellX(int col) const {
  return -0.5 * grid_size * cell_size + (col + 0.5) * cell_size;
}

double DoughState::CellY(int row) const {
  return 0.5 * grid_size * cell_size - (row + 0.5) * cell_size;
}

double GoalSpec::Volume() const {
  double total = 0.0;
  for (double h : goal_heights) total += h;
  return total * cell_size * cell_size;
}

}  // namespace dgform
