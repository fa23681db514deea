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

#ifndef DGFORM_EVAL_AGENTS_H_
#define DGFORM_EVAL_AGENTS_H_

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "dgform/common/rng.h"
#include "dgform/env/dough_env.h"
#include "dgform/eval/metrics.h"
#include "dgform/net/model.h"
#include "dgform/percept/graph.h"
#include "dgform/tensor/adam.h"
#include "dgform/trainer/train.h"

namespace dgform {

// Baseline observation spaces for model-free PPO.
enum class Representation {
  kRandom,       // uniform actions, no learning
  kFullState,    // height field + pin pose
  kRgbd,         // block-averaged RGB-D image
  kHomoGraph,    // object subgraph only
  kHeteroGraph,  // object subgraph + manipulator nodes
};

std::string RepresentationName(Representation r);

// What an agent may look at on one step.
struct AgentObservation {
  const DoughState* state = nullptr;
  const RgbdObs* obs = nullptr;
  const ObjectSubgraph* subgraph = nullptr;  // null unless NeedsGraph()
  BimanualPose pose;                         // current manipulator pose
};

struct AgentInput {
  GraphInstance graph;
  std::vector<double> features;
};

struct AgentOutput {
  Var mean;     // B x action_dim
  Var log_std;  // 1 x action_dim
  Var value;    // B x 1
};

class Agent {
 public:
  virtual ~Agent() = default;
  virtual Representation representation() const = 0;
  virtual bool NeedsGraph() const { return false; }
  virtual bool Learns() const { return true; }
  virtual AgentInput Encode(const AgentObservation& o) const = 0;
  // Parameters bound as leaves when `train`, else as constants.
  virtual AgentOutput Forward(Tape& tape, const std::vector<AgentInput>& inputs,
                              bool train) = 0;
  virtual std::vector<Tensor*> Parameters() = 0;

  // Action in normalized units plus its log density and value estimate.
  struct Decision {
    ActionSample sample;
    double value = 0.0;
  };
  virtual Decision Act(const AgentInput& input, Rng& rng, bool deterministic);

  const ModelConfig& config() const { return config_; }

 protected:
  explicit Agent(ModelConfig config) : config_(std::move(config)) {}
  ModelConfig config_;
};

// `goal` feeds the graph agents' goal encoders; the vector agents see a fixed
// goal and ignore it.
std::unique_ptr<Agent> MakeAgent(Representation r, const EnvConfig& env, int hidden_dim,
                                 const ObjectSubgraph& goal, Rng& rng);

// Image features: rgb / 255 and (depth_reference - depth) / depth_scale,
// each block-averaged to side x side, channel-major.
std::vector<double> DownsampleRgbd(const RgbdObs& obs, int side,
                                   const ObjectFeatureScaling& scaling);

// Closed-loop episode under the period protocol: every `period` steps the pin
// returns to its start pose.
EpisodeResult RunAgentEpisode(Agent& agent, const DoughEnv& env, int period,
                              std::uint64_t env_seed, Rng& rng, bool deterministic);

// Model-free PPO (clip + value + entropy) with the trainer's period protocol.
class AgentTrainer {
 public:
  AgentTrainer(Representation r, const TrainConfig& config);
  AgentTrainer(const AgentTrainer&) = delete;
  AgentTrainer& operator=(const AgentTrainer&) = delete;

  // TrainingError on a non-finite loss; the agent is restored first.
  UpdateMetrics Step();
  Agent& agent() { return *agent_; }
  const ObjectSubgraph& goal() const { return goal_; }
  const DoughEnv& env() const { return env_; }

 private:
  TrainConfig config_;
  DoughEnv env_;
  ObjectSubgraph goal_;
  std::unique_ptr<Agent> agent_;
  std::unique_ptr<Adam> adam_;
  Rng rng_;
  int update_ = 0;
  int episode_ = 0;
  std::optional<DoughState> state_;
};

}  // namespace dgform

#endif  // DGFORM_EVAL_AGENTS_H_
