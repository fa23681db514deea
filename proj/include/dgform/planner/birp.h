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

#ifndef DGFORM_PLANNER_BIRP_H_
#define DGFORM_PLANNER_BIRP_H_

#include <array>
#include <string>
#include <vector>

#include "dgform/env/types.h"
#include "dgform/planner/gaussian.h"
#include "dgform/planner/lqt.h"
#include "dgform/trainer/demos.h"
#include "json.hpp"

namespace dgform {

// Component k of a K-component source covers steps [k T / K, (k + 1) T / K).
int ComponentAtStep(int step, int components, int steps);

// Frames of one source: a single static frame or one per output step.
using FrameSequence = std::vector<TaskFrame>;

// Maps every source GMM into the task frame and fuses the time-assigned
// components step by step. Component order is taken as demonstration-time
// order. ContractError on mismatched K, dimensions or frame counts.
std::vector<Gaussian> BuildReference(const std::vector<Gmm>& sources,
                                     const std::vector<FrameSequence>& frames, int steps);

struct PlannerConfig {
  int components = 5;
  int order = 2;
  double control_weight = 1e-3;
  int points = 10000;
  double total_time = 10.0;  // dt = total_time / points
  double waypoint_variance = 1e-4;
  double free_variance = 1e2;
  // Precision multiplier of the coordination term; 0 disables it.
  double coordination_weight = 1.0;
  // Smoothness limit on Cartesian acceleration, m/s^2.
  double max_acceleration = 13.0;
  std::uint64_t seed = 0;
  GmmFitOptions gmm;

  void Validate() const;
};

PlannerConfig PlannerConfigFromJson(const nlohmann::json& j);
nlohmann::json PlannerConfigToJson(const PlannerConfig& config);

struct BimanualTrajectory {
  std::vector<double> time;
  std::vector<EePose> left;
  std::vector<EePose> right;

  int size() const { return static_cast<int>(time.size()); }
};

// Coordination frame of an arm: positions rotated by the other arm's
// orientation and offset by its pose, quaternion coordinates unrotated.
TaskFrame CoordinationFrame(const EePose& other);

// Pose of `arm` (0 left, 1 right) relative to the other arm, expressed in the
// other arm's coordination frame.
Eigen::VectorXd RelativePose(const BimanualPose& pose, int arm);

// GMM over RelativePose for one arm. Components are ordered by demonstration
// time: the fit runs on [normalized time, relative pose] and the time
// coordinate is then marginalized out.
Gmm FitCoordinationGmm(const DemoDataset& demos, int arm, int components,
                       std::uint64_t seed, const GmmFitOptions& options = {});

struct SmoothnessReport {
  double max_acceleration = 0.0;  // Cartesian, both arms
  double max_waypoint_error = 0.0;  // position, at waypoint times
  bool within_limit = false;
};

struct PlanResult {
  BimanualTrajectory trajectory;
  std::array<Gmm, 2> coordination;  // per arm
  std::vector<int> waypoint_steps;
  SmoothnessReport smoothness;
};

// Expands a waypoint path into config.points steps per arm. Each arm tracks
// its own waypoints fused with its coordination GMM mapped through the
// coordination frame of the other arm's interpolated waypoint reference.
// ContractError on fewer than two or non-finite waypoints, or empty demos.
PlanResult PlanBimanual(const std::vector<BimanualPose>& waypoints,
                        const DemoDataset& demos, const PlannerConfig& config);

// Mean distance, over steps and arms, between RelativePose and the
// time-assigned coordination component mean.
double RelativePoseError(const BimanualTrajectory& trajectory,
                         const std::array<Gmm, 2>& coordination);

SmoothnessReport MeasureSmoothness(const BimanualTrajectory& trajectory,
                                   const std::vector<BimanualPose>& waypoints,
                                   const std::vector<int>& waypoint_steps,
                                   double max_acceleration);

// CSV columns: t, then left and right poses (x y z qw qx qy qz).
void WriteTrajectoryCsv(const std::string& path, const BimanualTrajectory& trajectory);
// dt, order and per-arm dimension for the CSV's consumers.
nlohmann::json TrajectoryHeader(const BimanualTrajectory& trajectory, int order);

// One waypoint per line: 14 comma- or space-separated numbers. Blank lines
// and lines starting with '#' are skipped; ParseError names the line.
std::vector<BimanualPose> LoadWaypoints(const std::string& path);

}  // namespace dgform

#endif  // DGFORM_PLANNER_BIRP_H_
