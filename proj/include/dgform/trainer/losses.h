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

#ifndef DGFORM_TRAINER_LOSSES_H_
#define DGFORM_TRAINER_LOSSES_H_

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "dgform/net/graph_batch.h"
#include "dgform/net/model.h"
#include "dgform/tensor/tape.h"

namespace dgform {

struct GaeResult {
  std::vector<double> advantages;
  std::vector<double> returns;
};

// GAE(lambda) with `last_value` bootstrapping the step after the sequence
// (pass 0 at a terminal). Returns are advantage + value before normalization;
// advantages are then standardized when normalize is set and there are at
// least two steps (a zero-spread batch normalizes to zeros).
GaeResult ComputeGae(std::span<const double> rewards,
                     std::span<const double> values, double last_value,
                     double gamma, double lambda, bool normalize = true);

// Mean of -min(rho A, clip(rho, 1 - eps, 1 + eps) A), rho = exp(new - old).
// logp_new is B x 1.
Var ClipLoss(Var logp_new, const Tensor& logp_old, const Tensor& advantages,
             double clip_eps);
Var ValueLoss(Var values, const Tensor& returns);
// Mean squared error over every node attribute. ContractError on shape
// mismatch.
Var DynamicsLoss(Var predicted, const Tensor& actual);
// Mean entropy of a batch of diagonal Gaussians sharing log_std.
Var EntropyTerm(Var log_std);
double GaussianEntropyValue(std::span<const double> log_std);

enum class ImitationForm {
  kLogLikelihood,  // -mean log pi(zeta | SXG)
  kLikelihood,     // -mean pi(zeta | SXG), the literal raw-likelihood sum
};

// logp is B x 1 of demo-action log densities. ContractError when empty.
Var ImitationLoss(Var logp, ImitationForm form);

// Projected dual ascent: max(0, alpha + lr (L_imi - tau)).
double LagrangeUpdate(double alpha, double imitation_loss, double tau,
                      double alpha_lr);

struct LossWeights {
  double c1 = 0.5;   // value
  double c2 = 1.0;   // dynamics
  double c3 = 0.01;  // entropy
  double clip_eps = 0.2;
  double tau = 1.0;
  double alpha = 1.0;  // initial multiplier
  double alpha_lr = 0.01;

  // ConfigError on negative weights or clip_eps outside (0, 1).
  void Validate() const;
  bool operator==(const LossWeights&) const = default;
};

struct LossBreakdown {
  double clip = 0.0;
  double value = 0.0;
  double dyn = 0.0;
  double entropy = 0.0;
  double imitation = 0.0;  // NaN-free; 0 when no demos
  double alpha = 0.0;
  double total = 0.0;
};

// Tensors for one PPO period.
struct PpoBatch {
  GraphBatch graphs;      // states the actions were sampled at
  GraphBatch goal;        // single goal graph shared by the batch
  Tensor actions;         // B x action_dim, normalized
  Tensor logp_old;        // B x 1
  Tensor advantages;      // B x 1
  Tensor returns;         // B x 1
  std::optional<GraphBatch> dyn_graphs;  // real SG_t with executed poses
  Tensor dyn_targets;     // (B n_o) x obj_attr_dim, normalized real SG_{t+1}
};

struct DemoBatch {
  GraphBatch graphs;  // demo subgraph + previous demo pose
  GraphBatch goals;   // final frame of each sample's rollout
  Tensor actions;     // normalized demo poses
};

// alpha * L_imi + L_clip + c1 L_vf + c2 L_dyn - c3 S. The imitation term is
// left off the tape when alpha is 0 or demos is null, and the dynamics term
// when the batch carries no dynamics graphs, so those cases reproduce the
// reduced objective exactly. TrainingError names any non-finite component.
Var TotalLoss(Tape& tape, const ParamVars& params, const PpoBatch& batch,
              const DemoBatch* demos, const LossWeights& weights, double alpha,
              ImitationForm form, LossBreakdown* breakdown);

// Imitation loss only, e.g. for the dual step after a primal update.
double ImitationLossValue(const ModelParams& params, const DemoBatch& demos,
                          ImitationForm form);

}  // namespace dgform

#endif  // DGFORM_TRAINER_LOSSES_H_
