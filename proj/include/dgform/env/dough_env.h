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

#ifndef DGFORM_ENV_DOUGH_ENV_H_
#define DGFORM_ENV_DOUGH_ENV_H_

#include <cstdint>
#include <string>
#include <utility>

#include "dgform/env/types.h"
#include "dgform/eval/metrics.h"

namespace dgform {

// Colors used by the top-down renderer.
inline constexpr std::array<std::uint8_t, 3> kDoughColor = {222, 190, 140};
inline constexpr std::array<std::uint8_t, 3> kBoardColor = {70, 100, 150};
inline constexpr std::array<std::uint8_t, 3> kPinColor = {40, 40, 40};

struct RewardWeights {
  double sdf = 1.0;
  double iou = 10.0;
  double density = 0.01;
  bool operator==(const RewardWeights&) const = default;
};

struct EnvConfig {
  int grid_size = 64;
  double board_size = 0.4;
  // initial mound: elliptic paraboloid rescaled to exactly `volume`
  double volume = 2.25e-4;
  double mound_radius = 0.06;
  double mound_center_jitter = 0.03;
  double mound_aspect_jitter = 0.2;
  double pin_radius = 0.02;
  double pin_half_length = 0.09;
  double pin_start_z = 0.1;
  double pin_max_z = 0.2;
  int horizon = 250;
  int camera_resolution = 128;
  double camera_height = 0.5;
  RewardWeights reward;
  bool occlusion = false;
  // minimum height (m) for a cell to count as dough in masks and images
  double mask_threshold = 1e-3;
  double goal_radius = 0.12;

  double cell_size() const { return board_size / grid_size; }
  // throws ConfigError
  void Validate() const;
  bool operator==(const EnvConfig&) const = default;
};

enum class GoalKind { kFlatDisk };

struct GoalParams {
  double radius = 0.12;
  double volume = 2.25e-4;
  double center_x = 0.0;
  double center_y = 0.0;
};

// Disk mask of cells whose centers lie within radius, uniform height
// volume / (pi r^2) on the mask.
GoalSpec MakeGoal(GoalKind kind, const GoalParams& params,
                  const EnvConfig& config);
// goal built from config.goal_radius and config.volume
GoalSpec DefaultGoal(const EnvConfig& config);

// Midpoint of the two end-effector positions is the pin center; their
// separation axis is the pin axis.
PinPose DecodePin(const BimanualPose& action, const EnvConfig& config);
// End-effector pair that holds the pin at `pin`.
BimanualPose EncodePin(const PinPose& pin);

struct StepResult {
  DoughState state;
  RgbdObs obs;
  double reward = 0.0;
  bool done = false;
  bool clipped = false;  // requested pose was outside the board
  MetricSnapshot metrics;
};

class DoughEnv {
 public:
  DoughEnv(EnvConfig config, GoalSpec goal);
  explicit DoughEnv(EnvConfig config);

  // Deterministic mound for a seed; pin at the canonical start pose.
  std::pair<DoughState, RgbdObs> Reset(std::uint64_t seed) const;

  // Sweeps the pin from its current pose to the decoded action pose in
  // sub-cell increments, flattening the footprint at each increment.
  // Throws ActionError on non-finite actions.
  StepResult Step(const DoughState& state, const BimanualPose& action) const;

  RgbdObs Render(const DoughState& state) const;

  // Returns `state` with the pin moved to the start pose, no deformation.
  DoughState ResetPin(DoughState state) const;

  PinPose StartPin() const;
  BimanualPose StartAction() const { return EncodePin(StartPin()); }

  const EnvConfig& config() const { return config_; }
  const GoalSpec& goal() const { return goal_; }
  // goal heights rendered as a state (pin at start)
  DoughState GoalState() const;
  MetricSnapshot Metrics(const DoughState& state) const;

 private:
  // Flattens the capsule footprint at `pin`; returns volume moved.
  double Flatten(DoughState& state, const PinPose& pin) const;

  EnvConfig config_;
  GoalSpec goal_;
};

// Capsule footprint test: board point within radius of the pin axis segment.
bool UnderPin(const PinPose& pin, double x, double y);

}  // namespace dgform

#endif  // DGFORM_ENV_DOUGH_ENV_H_
