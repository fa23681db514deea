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

#ifndef DGFORM_TRAINER_TRAIN_H_
#define DGFORM_TRAINER_TRAIN_H_

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "dgform/env/dough_env.h"
#include "dgform/eval/metrics.h"
#include "dgform/net/checkpoint.h"
#include "dgform/net/model.h"
#include "dgform/tensor/adam.h"
#include "dgform/trainer/demos.h"
#include "dgform/trainer/losses.h"
#include "json.hpp"

namespace dgform {

enum class Variant {
  kVanilla,    // "dgform": no demonstration term
  kImitation,  // "dgform-i": demonstration term with fixed alpha
  kLagrange,   // "dgform-il": demonstration term with dual-ascent alpha
};

std::string VariantName(Variant v);
// ConfigError on an unknown name.
Variant ParseVariant(const std::string& name);

struct TrainConfig {
  EnvConfig env;
  int hidden_dim = 64;
  LossWeights weights;
  Variant variant = Variant::kLagrange;
  ImitationForm imitation_form = ImitationForm::kLogLikelihood;
  int updates = 200;
  int horizon = 50;  // model-based period H
  int ppo_epochs = 1;  // primal Adam steps per update
  double lr = 1e-3;
  double gamma = 0.99;
  double lambda = 0.95;
  int demo_batch = 64;
  int num_demos = 10;  // scripted demos generated when none are supplied
  std::uint64_t seed = 0;

  void Validate() const;
  ModelConfig MakeModelConfig() const;
  bool operator==(const TrainConfig&) const = default;
};

// Unknown keys are rejected; "env" nests an env config.
TrainConfig TrainConfigFromJson(const nlohmann::json& j);
nlohmann::json TrainConfigToJson(const TrainConfig& config);

struct UpdateMetrics {
  int update = 0;
  double reward_mean = 0.0;
  double loss_clip = 0.0;
  double loss_vf = 0.0;
  double loss_dyn = 0.0;
  double entropy = 0.0;
  double loss_imi = 0.0;
  double alpha = 0.0;
  double iou = 0.0;
  double sdf = 0.0;
  double density = 0.0;
};

std::string MetricsCsvHeader();
std::string MetricsCsvRow(const UpdateMetrics& m);

struct PeriodRecord {
  std::vector<BimanualPose> poses;
  std::vector<double> rewards;
  MetricSnapshot metrics;
};

struct EpisodeResult {
  double total_reward = 0.0;
  MetricSnapshot initial;
  MetricSnapshot final;
  std::vector<PeriodRecord> periods;
  DoughState final_state;
};

// One env episode as repeated model-based periods: the pin returns to its
// start pose, the model imagines `period` steps from the observed graph, and
// the imagined poses are executed.
EpisodeResult RunEpisode(const Model& model, const DoughEnv& env,
                         const ObjectSubgraph& goal, int period,
                         std::uint64_t env_seed, Rng& rng, bool deterministic);

// Graph abstraction of the env's goal state.
ObjectSubgraph GoalSubgraph(const DoughEnv& env);

class Trainer {
 public:
  // dgform-i / dgform-il without demos generate scripted ones.
  explicit Trainer(TrainConfig config, std::optional<DemoDataset> demos = {});
  Trainer(const Trainer&) = delete;
  Trainer& operator=(const Trainer&) = delete;

  // One update: one H-step period plus PPO epochs and the dual step.
  // TrainingError when a loss goes non-finite; the model is then restored to
  // its state before the update.
  UpdateMetrics Step();

  int update() const { return update_; }
  double alpha() const { return alpha_; }
  const Model& model() const { return model_; }
  const TrainConfig& config() const { return config_; }
  const DoughEnv& env() const { return env_; }
  const ObjectSubgraph& goal() const { return goal_; }
  const DemoDataset& demos() const { return demos_; }
  Checkpoint MakeCheckpoint() const;

 private:
  bool UsesDemos() const { return config_.variant != Variant::kVanilla; }

  TrainConfig config_;
  DoughEnv env_;
  ObjectSubgraph goal_;
  Model model_;
  Adam adam_;
  Rng rng_;
  DemoDataset demos_;
  DemoIndex demo_index_;
  double alpha_ = 0.0;
  int update_ = 0;
  int episode_ = 0;
  std::optional<DoughState> state_;
};

struct TrainResult {
  std::vector<UpdateMetrics> metrics;
  Checkpoint final;
  bool diverged = false;
  std::string error;
};

// Runs config.updates updates. On divergence the result holds the last good
// checkpoint and the error. on_update sees every completed update.
TrainResult Train(const TrainConfig& config, std::optional<DemoDataset> demos = {},
                  const std::function<void(const UpdateMetrics&, const Trainer&)>&
                      on_update = nullptr);

}  // namespace dgform

#endif  // DGFORM_TRAINER_TRAIN_H_
