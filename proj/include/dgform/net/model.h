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

#ifndef DGFORM_NET_MODEL_H_
#define DGFORM_NET_MODEL_H_

#include <span>
#include <string>
#include <utility>
#include <vector>

#include "dgform/common/rng.h"
#include "dgform/env/dough_env.h"
#include "dgform/net/graph_batch.h"
#include "dgform/percept/graph.h"
#include "dgform/tensor/tape.h"

namespace dgform {

// Affine map between env poses and the policy's unit-scale action space:
// pose = offset + scale * u. Quaternions are re-normalized on the way out.
struct ActionScaling {
  std::vector<double> offset;
  std::vector<double> scale;

  // offset = the env's start pose, scale 0.15 m (x, y), 0.05 m (z), 1
  // (quaternion).
  static ActionScaling ForEnv(const EnvConfig& config);
  std::vector<double> Normalize(const BimanualPose& pose) const;
  BimanualPose Denormalize(std::span<const double> u) const;
  // Manipulator node features: like Normalize, but both arms share the mean
  // arm offset so that relabeling the arms permutes the features.
  std::array<double, EePose::kDim> NodeFeatures(const EePose& pose,
                                                int arm) const;
  bool operator==(const ActionScaling&) const = default;
};

// Object node attributes (x, y, depth) to network inputs.
struct ObjectFeatureScaling {
  double position_scale = 0.2;
  double depth_reference = 0.5;  // camera height: depth of the bare board
  double depth_scale = 0.02;

  static ObjectFeatureScaling ForEnv(const EnvConfig& config);
  std::array<double, 3> Normalize(const ObjectNode& node) const;
  ObjectNode Denormalize(std::span<const double> f) const;
  bool operator==(const ObjectFeatureScaling&) const = default;
};

struct ModelConfig {
  int hidden_dim = 64;
  int obj_attr_dim = 3;
  int man_attr_dim = EePose::kDim;
  int num_manipulators = 2;
  double init_log_std = -0.5;
  // std of the policy output layer at init, small so the first policy stays
  // near the offset pose
  double policy_out_init = 0.01;
  ObjectFeatureScaling features;
  ActionScaling actions;

  static ModelConfig ForEnv(const EnvConfig& config);
  int action_dim() const { return num_manipulators * man_attr_dim; }
  void Validate() const;
  bool operator==(const ModelConfig&) const = default;
};

inline constexpr double kLogStdMin = -5.0;
inline constexpr double kLogStdMax = 2.0;

struct GcnLayerParams {
  Tensor obj_self, obj_from_obj, obj_from_man, obj_bias;
  Tensor man_self, man_from_obj, man_bias;
};

struct GoalLayerParams {
  Tensor self, from_obj, bias;
};

struct MlpParams {
  Tensor w1, b1, w2, b2;
};

struct ModelParams {
  int hidden_dim = 0;
  GcnLayerParams gcn[2];
  GoalLayerParams goal[2];
  MlpParams policy;
  Tensor log_std;  // 1 x action_dim
  MlpParams transition;
  MlpParams value;

  // Glorot-uniform weights, zero biases; every tensor requires grad.
  static ModelParams Init(const ModelConfig& config, Rng& rng);
  // Every weight and bias zero, log_std at config.init_log_std.
  static ModelParams Zeros(const ModelConfig& config);

  // Stable order; names are "<group>.<field>", groups gcn0, gcn1, goal0,
  // goal1, policy, transition, value.
  std::vector<std::pair<std::string, Tensor*>> Named();
  std::vector<std::pair<std::string, const Tensor*>> Named() const;
  std::vector<Tensor*> All();
  bool AllFinite() const;
};

// Parameters bound as leaves on one tape.
struct ParamVars {
  struct Gcn {
    Var obj_self, obj_from_obj, obj_from_man, obj_bias;
    Var man_self, man_from_obj, man_bias;
  };
  struct Goal {
    Var self, from_obj, bias;
  };
  struct Mlp {
    Var w1, b1, w2, b2;
  };
  Gcn gcn[2];
  Goal goal[2];
  Mlp policy;
  Var log_std;  // clamped to [kLogStdMin, kLogStdMax]
  Mlp transition;
  Mlp value;

  // Leaves: Backward accumulates into the parameters' grads.
  static ParamVars Bind(Tape& tape, ModelParams& params);
  // Constants: for evaluation-only tapes.
  static ParamVars BindConstant(Tape& tape, const ModelParams& params);
};

struct Hidden {
  Var obj;  // (B n_o) x H
  Var man;  // (B n_m) x H
};

struct PolicyOutput {
  Var mean;     // B x action_dim
  Var log_std;  // 1 x action_dim
};

// Two rounds of typed message passing: per node,
// tanh(self + mean-aggregated messages per edge type, summed over types).
Hidden HeteroGcnForward(Tape& tape, const GraphBatch& batch, const ParamVars& p);
// Object-branch GCN on manipulator-free goal graphs, mean pooled: B x H.
Var EncodeGoal(Tape& tape, const GraphBatch& goals, const ParamVars& p);
// goal_emb is B x H or a single 1 x H row shared by the batch.
PolicyOutput PolicyHead(const Hidden& h, const GraphBatch& batch, Var goal_emb,
                        const ParamVars& p);
// Next object attributes in normalized units: (B n_o) x obj_attr_dim.
Var TransitionHead(const Hidden& h, const GraphBatch& batch, const ParamVars& p);
// B x 1.
Var ValueHead(const Hidden& h, const GraphBatch& batch, const ParamVars& p);

// Diagonal Gaussian log density of each row of `actions`: B x 1.
Var GaussianLogProb(Var mean, Var log_std, const Tensor& actions);
// Entropy of the diagonal Gaussian, 1 x 1.
Var GaussianEntropy(Var log_std);

struct ActionDistribution {
  std::vector<double> mean;
  std::vector<double> log_std;
};

struct ActionSample {
  std::vector<double> action;
  double logprob = 0.0;
};

// Gaussian draw (or the mean when deterministic) and its exact log density.
ActionSample SampleAction(const ActionDistribution& dist, Rng& rng,
                          bool deterministic = false);
double LogProb(const ActionDistribution& dist, std::span<const double> action);

// Graph inputs from env-side structures.
GraphInstance MakeInstance(const ObjectSubgraph& object,
                           const BimanualPose& manipulators,
                           const ModelConfig& config);
GraphInstance MakeInstance(const HeteroGraph& graph, const ModelConfig& config);
GraphInstance MakeGoalInstance(const ObjectSubgraph& goal,
                               const ModelConfig& config);

struct StepEvaluation {
  ActionDistribution dist;
  double value = 0.0;
};

// Config plus parameters with tape-free conveniences for acting.
class Model {
 public:
  Model(ModelConfig config, ModelParams params);
  Model(const ModelConfig& config, Rng& rng);

  const ModelConfig& config() const { return config_; }
  ModelParams& params() { return params_; }
  const ModelParams& params() const { return params_; }

  StepEvaluation Evaluate(const HeteroGraph& graph,
                          const ObjectSubgraph& goal) const;
  StepEvaluation Evaluate(const GraphInstance& graph,
                          const ObjectSubgraph& goal) const;
  // Transition head prediction for a graph whose manipulators already hold
  // the action.
  ObjectSubgraph PredictNext(const GraphInstance& acted) const;

 private:
  ModelConfig config_;
  ModelParams params_;
};

}  // namespace dgform

#endif  // DGFORM_NET_MODEL_H_
