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

#include "dgform/trainer/losses.h"

#include <cmath>
#include <numeric>

#include "dgform/common/error.h"

namespace dgform {
namespace {

constexpr double kHalfLog2PiE = 1.4189385332046727;  // 0.5 log(2 pi e)

void CheckColumn(const Tensor& t, int rows, const char* what) {
  if (t.rows() != rows || t.cols() != 1) {
    throw ContractError(std::string(what) + ": expected " + std::to_string(rows) +
                        "x1, got " + t.ShapeString());
  }
}

double Finite(const char* component, double v) {
  if (!std::isfinite(v)) throw TrainingError(component, "non-finite loss");
  return v;
}

}  // namespace

GaeResult ComputeGae(std::span<const double> rewards,
                     std::span<const double> values, double last_value,
                     double gamma, double lambda, bool normalize) {
  if (rewards.size() != values.size()) {
    throw ContractError("compute_gae: rewards and values differ in length");
  }
  if (gamma < 0 || gamma > 1 || lambda < 0 || lambda > 1) {
    throw ContractError("compute_gae: gamma and lambda must lie in [0, 1]");
  }
  const size_t n = rewards.size();
  GaeResult out;
  out.advantages.resize(n);
  out.returns.resize(n);
  double running = 0.0;
  for (size_t i = n; i-- > 0;) {
    const double next = i + 1 < n ? values[i + 1] : last_value;
    const double delta = rewards[i] + gamma * next - values[i];
    running = delta + gamma * lambda * running;
    out.advantages[i] = running;
    out.returns[i] = running + values[i];
  }
  if (normalize && n >= 2) {
    const double mean =
        std::accumulate(out.advantages.begin(), out.advantages.end(), 0.0) / n;
    double var = 0.0;
    for (double a : out.advantages) var += (a - mean) * (a - mean);
    const double sd = std::sqrt(var / n);
    for (double& a : out.advantages) a = sd > 1e-12 ? (a - mean) / sd : 0.0;
  }
  return out;
}

Var ClipLoss(Var logp_new, const Tensor& logp_old, const Tensor& advantages,
             double clip_eps) {
  const int b = logp_new.rows();
  CheckColumn(logp_old, b, "loss_clip logp_old");
  CheckColumn(advantages, b, "loss_clip advantages");
  Tape& tape = *logp_new.tape();
  Var adv = tape.Constant(advantages);
  Var ratio = Exp(Sub(logp_new, tape.Constant(logp_old)));
  Var clipped = Clamp(ratio, 1.0 - clip_eps, 1.0 + clip_eps);
  return Neg(Mean(Minimum(Mul(ratio, adv), Mul(clipped, adv))));
}

Var ValueLoss(Var values, const Tensor& returns) {
  CheckColumn(returns, values.rows(), "loss_value returns");
  return Mean(Square(Sub(values, values.tape()->Constant(returns))));
}

Var DynamicsLoss(Var predicted, const Tensor& actual) {
  if (!predicted.value().SameShape(actual)) {
    throw ContractError("loss_dyn: prediction " + predicted.value().ShapeString() +
                        " vs actual " + actual.ShapeString());
  }
  return Mean(Square(Sub(predicted, predicted.tape()->Constant(actual))));
}

Var EntropyTerm(Var log_std) { return GaussianEntropy(log_std); }

double GaussianEntropyValue(std::span<const double> log_std) {
  double s = 0.0;
  for (double l : log_std) s += l + kHalfLog2PiE;
  return s;
}

Var ImitationLoss(Var logp, ImitationForm form) {
  if (logp.rows() == 0) throw ContractError("loss_imitation: empty batch");
  return Neg(Mean(form == ImitationForm::kLogLikelihood ? logp : Exp(logp)));
}

double LagrangeUpdate(double alpha, double imitation_loss, double tau,
                      double alpha_lr) {
  if (alpha < 0.0) throw ContractError("lagrange_update: alpha must be >= 0");
  return std::max(0.0, alpha + alpha_lr * (imitation_loss - tau));
}

void LossWeights::Validate() const {
  if (c1 < 0 || c2 < 0 || c3 < 0) throw ConfigError("loss weights must be >= 0");
  if (!(clip_eps > 0 && clip_eps < 1)) throw ConfigError("clip_eps must lie in (0, 1)");
  if (alpha < 0 || alpha_lr < 0) throw ConfigError("alpha and alpha_lr must be >= 0");
}

namespace {

Var DemoLogProb(Tape& tape, const ParamVars& p, const DemoBatch& demos) {
  const Hidden h = HeteroGcnForward(tape, demos.graphs, p);
  const PolicyOutput pol = PolicyHead(h, demos.graphs, EncodeGoal(tape, demos.goals, p), p);
  return GaussianLogProb(pol.mean, pol.log_std, demos.actions);
}

}  // namespace

Var TotalLoss(Tape& tape, const ParamVars& p, const PpoBatch& batch,
              const DemoBatch* demos, const LossWeights& w, double alpha,
              ImitationForm form, LossBreakdown* breakdown) {
  const Hidden h = HeteroGcnForward(tape, batch.graphs, p);
  const PolicyOutput pol =
      PolicyHead(h, batch.graphs, EncodeGoal(tape, batch.goal, p), p);
  Var logp = GaussianLogProb(pol.mean, pol.log_std, batch.actions);
  Var clip = ClipLoss(logp, batch.logp_old, batch.advantages, w.clip_eps);
  Var value = ValueLoss(ValueHead(h, batch.graphs, p), batch.returns);
  Var entropy = EntropyTerm(pol.log_std);
  Var total = Add(Add(clip, Scale(value, w.c1)), Scale(entropy, -w.c3));

  LossBreakdown b;
  b.clip = Finite("loss_clip", clip.value().item());
  b.value = Finite("loss_vf", value.value().item());
  b.entropy = Finite("entropy", entropy.value().item());
  b.alpha = alpha;
  if (batch.dyn_graphs) {
    const GraphBatch& g = *batch.dyn_graphs;
    Var dyn = DynamicsLoss(TransitionHead(HeteroGcnForward(tape, g, p), g, p),
                           batch.dyn_targets);
    b.dyn = Finite("loss_dyn", dyn.value().item());
    total = Add(total, Scale(dyn, w.c2));
  }
  if (demos != nullptr) {
    Var imi = ImitationLoss(DemoLogProb(tape, p, *demos), form);
    b.imitation = Finite("loss_imi", imi.value().item());
    if (alpha != 0.0) total = Add(total, Scale(imi, alpha));
  }
  b.total = Finite("total", total.value().item());
  if (breakdown != nullptr) *breakdown = b;
  return total;
}

double ImitationLossValue(const ModelParams& params, const DemoBatch& demos,
                          ImitationForm form) {
  Tape tape;
  const ParamVars p = ParamVars::BindConstant(tape, params);
  return ImitationLoss(DemoLogProb(tape, p, demos), form).value().item();
}

}  // namespace dgform
