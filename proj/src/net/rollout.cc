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

#include "dgform/net/rollout.h"

#include <cmath>

#include "dgform/common/error.h"

namespace dgform {
namespace {

bool Finite(const ObjectSubgraph& sub) {
  for (const ObjectNode& n : sub.nodes) {
    if (!std::isfinite(n.x) || !std::isfinite(n.y) || !std::isfinite(n.depth)) {
      return false;
    }
  }
  return true;
}

}  // namespace

ModelRollout RunModelRollout(const Model& model, const HeteroGraph& start,
                             const ObjectSubgraph& goal, int horizon, Rng& rng,
                             bool deterministic, const TransitionFn& transition) {
  if (horizon < 1) throw ContractError("model_rollout: horizon must be >= 1");
  const ModelConfig& config = model.config();
  ModelRollout out;
  HeteroGraph graph = start;
  for (int t = 0; t < horizon; ++t) {
    const StepEvaluation eval = model.Evaluate(graph, goal);
    RolloutStep step;
    ActionSample sample = SampleAction(eval.dist, rng, deterministic);
    step.action = std::move(sample.action);
    step.logprob = sample.logprob;
    step.value = eval.value;
    step.pose = config.actions.Denormalize(step.action);
    const HeteroGraph acted = BuildHeteroGraph(graph.object, step.pose);
    step.predicted = transition ? transition(acted)
                                : model.PredictNext(MakeInstance(acted, config));
    if (!Finite(step.predicted) || !std::isfinite(step.value)) {
      out.truncated = true;
      out.error = "non-finite prediction at step " + std::to_string(t);
      break;
    }
    graph = BuildHeteroGraph(step.predicted, step.pose);
    out.steps.push_back(std::move(step));
  }
  return out;
}

}  // namespace dgform
