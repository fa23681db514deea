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

#ifndef DGFORM_ENV_TYPES_H_
#define DGFORM_ENV_TYPES_H_

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace dgform {

// Board frame: origin at the board center, +x right, +y up (toward image
// row 0), +z above the board surface. Lengths in meters.

// End-effector pose: position then unit quaternion (w, x, y, z).
struct EePose {
  static constexpr int kDim = 7;
  std::array<double, 3> position{};
  std::array<double, 4> quaternion{1.0, 0.0, 0.0, 0.0};

  std::array<double, kDim> ToArray() const;
  static EePose FromArray(std::span<const double> values);
  bool operator==(const EePose&) const = default;
};

// Dual end-effector command; the policy's action.
struct BimanualPose {
  static constexpr int kDim = 2 * EePose::kDim;
  EePose left;
  EePose right;

  std::vector<double> ToVector() const;
  static BimanualPose FromVector(std::span<const double> values);
  bool operator==(const BimanualPose&) const = default;
};

struct PinPose {
  double x = 0.0;
  double y = 0.0;
  double z = 0.1;  // axis height above the board
  double yaw = 0.0;
  double half_length = 0.09;
  double radius = 0.02;

  // lowest point of the pin; cells under the footprint are flattened to it
  double Clearance() const { return z > radius ? z - radius : 0.0; }
  bool operator==(const PinPose&) const = default;
};

// Height-field grid, row-major with row 0 at +y (same orientation as the
// rendered image).
struct DoughState {
  int grid_size = 0;
  double cell_size = 0.0;
  std::vector<double> heights;
  PinPose pin;
  int time_index = 0;

  double& height(int row, int col) { return heights[row * grid_size + col]; }
  double height(int row, int col) const {
    return heights[row * grid_size + col];
  }
  double Volume() const;
  // board-frame center of a cell
  double CellX(int col) const;
  double CellY(int row) const;
  bool operator==(const DoughState&) const = default;
};

struct RgbdObs {
  int height = 0;
  int width = 0;
  std::vector<std::uint8_t> rgb;  // height * width * 3
  std::vector<double> depth;      // height * width, meters from camera

  const std::uint8_t* pixel(int row, int col) const {
    return &rgb[(row * width + col) * 3];
  }
  double depth_at(int row, int col) const { return depth[row * width + col]; }
  bool operator==(const RgbdObs&) const = default;
};

struct GoalSpec {
  int grid_size = 0;
  double cell_size = 0.0;
  std::vector<double> goal_heights;
  std::vector<std::uint8_t> goal_mask;
  std::string description;

  double Volume() const;
};

}  // namespace dgform

#endif  // DGFORM_ENV_TYPES_H_
