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

#ifndef DGFORM_NET_ROLLOUT_H_
#define DGFORM_NET_ROLLOUT_H_

#include <functional>
#include <string>
#include <vector>

#include "dgform/net/model.h"

namespace dgform {

struct RolloutStep {
  std::vector<double> action;  // normalized policy sample
  BimanualPose pose;           // env-facing pose, quaternions re-projected
  ObjectSubgraph predicted;
  double logprob = 0.0;
  double value = 0.0;
};

struct ModelRollout {
  std::vector<RolloutStep> steps;
  bool truncated = false;
  std::string error;
};

// Next object subgraph for a graph whose manipulators hold the executed pose.
using TransitionFn = std::function<ObjectSubgraph(const HeteroGraph& acted)>;

// Imagined closed loop: encode, sample, predict the next object subgraph,
// rebuild the graph with the prediction and the sampled pose, repeat. The
// transition head is used unless `transition` is given. A non-finite
// prediction stops the rollout with `truncated` set.
ModelRollout RunModelRollout(const Model& model, const HeteroGraph& start,
                             const ObjectSubgraph& goal, int horizon, Rng& rng,
                             bool deterministic = false,
                             const TransitionFn& transition = nullptr);

}  // namespace dgform

#endif  // DGFORM_NET_ROLLOUT_H_
