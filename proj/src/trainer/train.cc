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

#include "dgform/trainer/train.h"

#include <cmath>
#include <cstdio>
#include <set>

#include "dgform/common/error.h"
#include "dgform/env/config_io.h"
#include "dgform/net/rollout.h"

namespace dgform {
namespace {

using nlohmann::json;

template <typename T>
void Read(const json& j, const char* key, T& field) {
  if (!j.contains(key)) return;
  try {
    field = j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ConfigError(std::string("train config field '") + key + "': " + e.what());
  }
}

void RejectUnknown(const json& j, const std::set<std::string>& keys,
                   const std::string& where) {
  if (!j.is_object()) throw ConfigError(where + " must be a JSON object");
  for (const auto& [key, value] : j.items()) {
    if (!keys.count(key)) throw ConfigError("unknown " + where + " key '" + key + "'");
  }
}

ObjectSubgraph Observe(const RgbdObs& obs, const EnvConfig& config,
                       const ObjectSubgraph* fallback) {
  try {
    return Abstract(obs, DoughColorBounds(), config.board_size).subgraph;
  } catch (const EmptySegmentation&) {
    if (fallback == nullptr) throw;
    return *fallback;
  }
}

void AppendNormalized(const ObjectSubgraph& sub, const ModelConfig& config,
                      std::vector<double>& out) {
  for (const ObjectNode& n : sub.nodes) {
    const auto f = config.features.Normalize(n);
    out.insert(out.end(), f.begin(), f.end());
  }
}

Tensor Column(const std::vector<double>& v) {
  return Tensor(static_cast<int>(v.size()), 1, v);
}

}  // namespace

std::string VariantName(Variant v) {
  switch (v) {
    case Variant::kVanilla:
      return "dgform";
    case Variant::kImitation:
      return "dgform-i";
    case Variant::kLagrange:
      return "dgform-il";
  }
  return "?";
}

Variant ParseVariant(const std::string& name) {
  for (Variant v : {Variant::kVanilla, Variant::kImitation, Variant::kLagrange}) {
    if (VariantName(v) == name) return v;
  }
  throw ConfigError("unknown variant '" + name + "' (dgform, dgform-i, dgform-il)");
}

void TrainConfig::Validate() const {
  env.Validate();
  weights.Validate();
  if (hidden_dim < 1) throw ConfigError("hidden_dim must be positive");
  if (updates < 0) throw ConfigError("updates must be >= 0");
  if (horizon < 1) throw ConfigError("horizon must be >= 1");
  if (ppo_epochs < 1) throw ConfigError("ppo_epochs must be >= 1");
  if (!(lr > 0)) throw ConfigError("lr must be positive");
  if (gamma < 0 || gamma > 1 || lambda < 0 || lambda > 1) {
    throw ConfigError("gamma and lambda must lie in [0, 1]");
  }
  if (demo_batch < 1 || num_demos < 1) {
    throw ConfigError("demo_batch and num_demos must be positive");
  }
}

ModelConfig TrainConfig::MakeModelConfig() const {
  ModelConfig m = ModelConfig::ForEnv(env);
  m.hidden_dim = hidden_dim;
  return m;
}

TrainConfig TrainConfigFromJson(const json& j) {
  RejectUnknown(j,
                {"env", "hidden_dim", "weights", "variant", "imitation_form",
                 "updates", "horizon", "ppo_epochs", "lr", "gamma", "lambda",
                 "demo_batch", "num_demos", "seed"},
                "train config");
  TrainConfig c;
  if (j.contains("env")) c.env = EnvConfigFromJson(j.at("env"));
  Read(j, "hidden_dim", c.hidden_dim);
  if (j.contains("weights")) {
    const json& w = j.at("weights");
    RejectUnknown(w, {"c1", "c2", "c3", "clip_eps", "tau", "alpha", "alpha_lr"},
                  "weights");
    Read(w, "c1", c.weights.c1);
    Read(w, "c2", c.weights.c2);
    Read(w, "c3", c.weights.c3);
    Read(w, "clip_eps", c.weights.clip_eps);
    Read(w, "tau", c.weights.tau);
    Read(w, "alpha", c.weights.alpha);
    Read(w, "alpha_lr", c.weights.alpha_lr);
  }
  if (j.contains("variant")) c.variant = ParseVariant(j.at("variant").get<std::string>());
  if (j.contains("imitation_form")) {
    const std::string form = j.at("imitation_form").get<std::string>();
    if (form == "log") {
      c.imitation_form = ImitationForm::kLogLikelihood;
    } else if (form == "likelihood") {
      c.imitation_form = ImitationForm::kLikelihood;
    } else {
      throw ConfigError("imitation_form must be 'log' or 'likelihood'");
    }
  }
  Read(j, "updates", c.updates);
  Read(j, "horizon", c.horizon);
  Read(j, "ppo_epochs", c.ppo_epochs);
  Read(j, "lr", c.lr);
  Read(j, "gamma", c.gamma);
  Read(j, "lambda", c.lambda);
  Read(j, "demo_batch", c.demo_batch);
  Read(j, "num_demos", c.num_demos);
  Read(j, "seed", c.seed);
  c.Validate();
  return c;
}

json TrainConfigToJson(const TrainConfig& c) {
  return {{"env", EnvConfigToJson(c.env)},
          {"hidden_dim", c.hidden_dim},
          {"weights",
           {{"c1", c.weights.c1},
            {"c2", c.weights.c2},
            {"c3", c.weights.c3},
            {"clip_eps", c.weights.clip_eps},
            {"tau", c.weights.tau},
            {"alpha", c.weights.alpha},
            {"alpha_lr", c.weights.alpha_lr}}},
          {"variant", VariantName(c.variant)},
          {"imitation_form",
           c.imitation_form == ImitationForm::kLogLikelihood ? "log" : "likelihood"},
          {"updates", c.updates},
          {"horizon", c.horizon},
          {"ppo_epochs", c.ppo_epochs},
          {"lr", c.lr},
          {"gamma", c.gamma},
          {"lambda", c.lambda},
          {"demo_batch", c.demo_batch},
          {"num_demos", c.num_demos},
          {"seed", c.seed}};
}

std::string MetricsCsvHeader() {
  return "update,reward_mean,loss_clip,loss_vf,loss_dyn,entropy,loss_imi,alpha,"
         "iou,sdf,density";
}

std::string MetricsCsvRow(const UpdateMetrics& m) {
  char buf[512];
  std::snprintf(buf, sizeof(buf),
                "%d,%.10g,%.10g,%.10g,%.10g,%.10g,%.10g,%.10g,%.10g,%.10g,%.10g",
                m.update, m.reward_mean, m.loss_clip, m.loss_vf, m.loss_dyn,
                m.entropy, m.loss_imi, m.alpha, m.iou, m.sdf, m.density);
  return buf;
}

ObjectSubgraph GoalSubgraph(const DoughEnv& env) {
  return Observe(env.Render(env.GoalState()), env.config(), nullptr);
}

EpisodeResult RunEpisode(const Model& model, const DoughEnv& env,
                         const ObjectSubgraph& goal, int period,
                         std::uint64_t env_seed, Rng& rng, bool deterministic) {
  EpisodeResult result;
  auto [state, obs] = env.Reset(env_seed);
  result.initial = env.Metrics(state);
  ObjectSubgraph sub = Observe(obs, env.config(), nullptr);
  const BimanualPose start = env.StartAction();
  bool done = false;
  while (!done) {
    state = env.ResetPin(std::move(state));
    sub = Observe(env.Render(state), env.config(), &sub);
    const ModelRollout plan = RunModelRollout(
        model, BuildHeteroGraph(sub, start), goal, period, rng, deterministic);
    if (plan.steps.empty()) throw TrainingError("model_rollout", plan.error);
    PeriodRecord record;
    for (const RolloutStep& step : plan.steps) {
      StepResult r = env.Step(state, step.pose);
      record.poses.push_back(step.pose);
      record.rewards.push_back(r.reward);
      result.total_reward += r.reward;
      sub = Observe(r.obs, env.config(), &sub);
      state = std::move(r.state);
      if (r.done) {
        done = true;
        break;
      }
    }
    record.metrics = env.Metrics(state);
    result.periods.push_back(std::move(record));
  }
  result.final = env.Metrics(state);
  result.final_state = std::move(state);
  return result;
}

Trainer::Trainer(TrainConfig config, std::optional<DemoDataset> demos)
    : config_((config.Validate(), std::move(config))),
      env_(config_.env),
      goal_(GoalSubgraph(env_)),
      model_([&] {
        Rng init(Rng::Derive(config_.seed, 0));
        return Model(config_.MakeModelConfig(), init);
      }()),
      adam_(model_.params().All(), AdamOptions{.lr = config_.lr}),
      rng_(Rng::Derive(config_.seed, 1)) {
  if (UsesDemos()) {
    demos_ = demos ? std::move(*demos)
                   : GenerateScriptedDemos(config_.env, config_.num_demos,
                                           Rng::Derive(config_.seed, 2));
    demo_index_ = AllDemoSteps(demos_);
    if (demo_index_.empty()) throw ConfigError("demonstration set has no steps");
    alpha_ = config_.weights.alpha;
  }
}

UpdateMetrics Trainer::Step() {
  const ModelConfig& mc = model_.config();
  const ModelParams backup = model_.params();
  const AdamState adam_backup = adam_.state();

  if (!state_) {
    auto [s, o] = env_.Reset(Rng::Derive(config_.seed, 100000 + episode_));
    state_ = std::move(s);
  }
  DoughState state = env_.ResetPin(*state_);
  ObjectSubgraph sub = Observe(env_.Render(state), config_.env, nullptr);
  const BimanualPose start = env_.StartAction();
  const HeteroGraph g0 = BuildHeteroGraph(sub, start);
  const ModelRollout plan = RunModelRollout(model_, g0, goal_, config_.horizon, rng_);
  if (plan.steps.empty()) throw TrainingError("model_rollout", plan.error);

  std::vector<GraphInstance> policy_graphs, dyn_graphs;
  std::vector<double> rewards, values, logp_old, dyn_targets, actions;
  HeteroGraph imagined = g0;
  MetricSnapshot last{};
  bool done = false;
  for (const RolloutStep& step : plan.steps) {
    policy_graphs.push_back(MakeInstance(imagined, mc));
    dyn_graphs.push_back(MakeInstance(sub, step.pose, mc));
    StepResult r = env_.Step(state, step.pose);
    sub = Observe(r.obs, config_.env, &sub);
    AppendNormalized(sub, mc, dyn_targets);
    rewards.push_back(r.reward);
    values.push_back(step.value);
    logp_old.push_back(step.logprob);
    actions.insert(actions.end(), step.action.begin(), step.action.end());
    last = r.metrics;
    state = std::move(r.state);
    imagined = BuildHeteroGraph(step.predicted, step.pose);
    if (r.done) {
      done = true;
      break;
    }
  }
  const double bootstrap =
      done ? 0.0 : model_.Evaluate(BuildHeteroGraph(sub, start), goal_).value;
  if (done) {
    state_.reset();
    ++episode_;
  } else {
    state_ = std::move(state);
  }

  const GaeResult gae =
      ComputeGae(rewards, values, bootstrap, config_.gamma, config_.lambda);
  const int n = static_cast<int>(rewards.size());
  PpoBatch batch{GraphBatch::Build(policy_graphs),
                 GraphBatch::Build({MakeGoalInstance(goal_, mc)}),
                 Tensor(n, mc.action_dim(), actions),
                 Column(logp_old),
                 Column(gae.advantages),
                 Column(gae.returns),
                 GraphBatch::Build(dyn_graphs),
                 Tensor(n * kObjectNodes, mc.obj_attr_dim, dyn_targets)};

  const double alpha_used = config_.variant == Variant::kVanilla ? 0.0 : alpha_;
  UpdateMetrics m;
  m.update = update_;
  std::optional<DemoBatch> demo_batch;
  try {
    for (int e = 0; e < config_.ppo_epochs; ++e) {
      if (UsesDemos()) {
        DemoIndex pick;
        for (int i = 0; i < config_.demo_batch; ++i) {
          pick.push_back(demo_index_[rng_.Index(demo_index_.size())]);
        }
        demo_batch = MakeDemoBatch(demos_, pick, mc, start);
      }
      adam_.ZeroGrad();
      Tape tape;
      const ParamVars p = ParamVars::Bind(tape, model_.params());
      LossBreakdown b;
      Var loss = TotalLoss(tape, p, batch, demo_batch ? &*demo_batch : nullptr,
                           config_.weights, alpha_used, config_.imitation_form, &b);
      tape.Backward(loss);
      adam_.Step();
      m.loss_clip += b.clip / config_.ppo_epochs;
      m.loss_vf += b.value / config_.ppo_epochs;
      m.loss_dyn += b.dyn / config_.ppo_epochs;
      m.entropy += b.entropy / config_.ppo_epochs;
      m.loss_imi += b.imitation / config_.ppo_epochs;
    }
    if (!model_.params().AllFinite()) {
      throw TrainingError("params", "non-finite parameter after update");
    }
    if (config_.variant == Variant::kLagrange) {
      const double imi =
          ImitationLossValue(model_.params(), *demo_batch, config_.imitation_form);
      if (!std::isfinite(imi)) throw TrainingError("loss_imi", "non-finite loss");
      alpha_ = LagrangeUpdate(alpha_, imi, config_.weights.tau,
                              config_.weights.alpha_lr);
    }
  } catch (const TrainingError&) {
    model_.params() = backup;
    adam_.set_state(adam_backup);
    throw;
  }

  double reward_sum = 0.0;
  for (double r : rewards) reward_sum += r;
  m.reward_mean = reward_sum / n;
  m.alpha = alpha_;
  m.iou = last.iou;
  m.sdf = last.sdf;
  m.density = last.density;
  ++update_;
  return m;
}

Checkpoint Trainer::MakeCheckpoint() const {
  Checkpoint ck;
  ck.config = model_.config();
  ck.params = model_.params();
  ck.alpha = alpha_;
  ck.seed = config_.seed;
  ck.update = update_;
  ck.rng_state = rng_.SaveState();
  ck.hyperparameters = TrainConfigToJson(config_);
  ck.optimizer = adam_.state();
  return ck;
}

TrainResult Train(const TrainConfig& config, std::optional<DemoDataset> demos,
                  const std::function<void(const UpdateMetrics&, const Trainer&)>&
                      on_update) {
  Trainer trainer(config, std::move(demos));
  TrainResult result;
  for (int u = 0; u < config.updates; ++u) {
    try {
      result.metrics.push_back(trainer.Step());
    } catch (const TrainingError& e) {
      result.diverged = true;
      result.error = e.what();
      break;
    }
    if (on_update) on_update(result.metrics.back(), trainer);
  }
  result.final = trainer.MakeCheckpoint();
  return result;
}

}  // namespace dgform
