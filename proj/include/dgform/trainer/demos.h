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

#ifndef DGFORM_TRAINER_DEMOS_H_
#define DGFORM_TRAINER_DEMOS_H_

#include <cstdint>
#include <numbers>
#include <string>
#include <utility>
#include <vector>

#include "dgform/env/dough_env.h"
#include "dgform/net/model.h"
#include "dgform/percept/graph.h"
#include "dgform/trainer/losses.h"

namespace dgform {

// One demonstrated step: the object subgraph observed before the pose
// zeta_t was executed.
struct DemoStep {
  BimanualPose zeta;
  ObjectSubgraph subgraph;
  bool operator==(const DemoStep&) const = default;
};

struct DemoRollout {
  int id = 0;
  std::vector<DemoStep> steps;
  bool operator==(const DemoRollout&) const = default;
};

struct DemoDataset {
  std::vector<DemoRollout> rollouts;

  int NumSteps() const;
  bool operator==(const DemoDataset&) const = default;
};

// JSON Lines, one step per line:
// {"rollout_id", "t", "zeta": [14], "subgraph": {"nodes": [{x, y, depth} x 9]}}
// ParseError (with line number) on schema violations, an empty file, or
// steps out of order.
DemoDataset LoadDemonstrations(const std::string& path);
void SaveDemonstrations(const std::string& path, const DemoDataset& demos);

struct ScriptedDemoOptions {
  int strokes = 16;
  // stroke k heads out at phase + k * turn
  double turn = 3.0 * std::numbers::pi / 8.0;
  double reach = 0.9;       // fraction of the goal radius
  double lift_height = 0.06;
};

// Press-and-roll controller: press at the dough center, then radial strokes
// outward, each followed by a lifted return, rotating the stroke direction
// every time. Deterministic per seed.
DemoDataset GenerateScriptedDemos(const EnvConfig& config, int n_rollouts,
                                  std::uint64_t seed,
                                  const ScriptedDemoOptions& options = {});

// (rollout index, step index) pairs.
using DemoIndex = std::vector<std::pair<int, int>>;
DemoIndex AllDemoSteps(const DemoDataset& demos);

// Manipulator nodes take the previous demo pose (the start pose before the
// first step); the target is zeta_t; the goal is the rollout's final frame.
DemoBatch MakeDemoBatch(const DemoDataset& demos, const DemoIndex& samples,
                        const ModelConfig& config, const BimanualPose& start);

}  // namespace dgform

#endif  // DGFORM_TRAINER_DEMOS_H_
