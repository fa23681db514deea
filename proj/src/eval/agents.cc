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

#include "dgform/eval/agents.h"

#include <cmath>

#include "dgform/common/error.h"
#include "dgform/trainer/losses.h"

namespace dgform {
namespace {

Tensor Param(Tensor t) {
  t.set_requires_grad(true);
  return t;
}

Tensor Glorot(int fan_in, int fan_out, Rng& rng) {
  const double a = std::sqrt(6.0 / (fan_in + fan_out));
  Tensor t(fan_in, fan_out);
  for (double& v : t.data()) v = rng.Uniform(-a, a);
  return Param(std::move(t));
}

Tensor SmallNormal(int rows, int cols, double scale, Rng& rng) {
  Tensor t(rows, cols);
  for (double& v : t.data()) v = scale * rng.Normal();
  return Param(std::move(t));
}

Tensor Zeros(int rows, int cols) { return Param(Tensor(rows, cols)); }

Var Bind(Tape& tape, Tensor& t, bool train) {
  return train ? tape.Leaf(t) : tape.Constant(t);
}

Var Affine(Var x, Var w, Var b) { return Add(MatMul(x, w), b); }

ObjectSubgraph Observe(const RgbdObs& obs, const EnvConfig& config,
                       const std::optional<ObjectSubgraph>& fallback) {
  try {
    return Abstract(obs, DoughColorBounds(), config.board_size).subgraph;
  } catch (const EmptySegmentation&) {
    if (!fallback) throw;
    return *fallback;
  }
}

// Shared output layers: tanh trunk, policy mean, value and log_std.
struct Heads {
  Tensor w1, b1, mean_w, mean_b, value_w, value_b, log_std;

  Heads(int in, const ModelConfig& c, Rng& rng)
      : w1(Glorot(in, c.hidden_dim, rng)),
        b1(Zeros(1, c.hidden_dim)),
        mean_w(SmallNormal(c.hidden_dim, c.action_dim(), c.policy_out_init, rng)),
        mean_b(Zeros(1, c.action_dim())),
        value_w(Glorot(c.hidden_dim, 1, rng)),
        value_b(Zeros(1, 1)),
        log_std(Param(Tensor(1, c.action_dim(), c.init_log_std))) {}

  AgentOutput Apply(Tape& tape, Var x, bool train) {
    Var h = Tanh(Affine(x, Bind(tape, w1, train), Bind(tape, b1, train)));
    return {Affine(h, Bind(tape, mean_w, train), Bind(tape, mean_b, train)),
            Clamp(Bind(tape, log_std, train), kLogStdMin, kLogStdMax),
            Affine(h, Bind(tape, value_w, train), Bind(tape, value_b, train))};
  }

  void Collect(std::vector<Tensor*>& out) {
    for (Tensor* t : {&w1, &b1, &mean_w, &mean_b, &value_w, &value_b, &log_std}) {
      out.push_back(t);
    }
  }
};

class RandomAgent : public Agent {
 public:
  explicit RandomAgent(ModelConfig c) : Agent(std::move(c)) {}
  Representation representation() const override { return Representation::kRandom; }
  bool Learns() const override { return false; }
  AgentInput Encode(const AgentObservation&) const override { return {}; }
  AgentOutput Forward(Tape&, const std::vector<AgentInput>&, bool) override {
    throw ContractError("random agent has no network");
  }
  std::vector<Tensor*> Parameters() override { return {}; }
  Decision Act(const AgentInput&, Rng& rng, bool) override {
    Decision d;
    d.sample.action.resize(config_.action_dim());
    for (double& u : d.sample.action) u = rng.Uniform(-1.0, 1.0);
    d.sample.logprob = -config_.action_dim() * std::log(2.0);
    return d;
  }
};

// MLP over a flat feature vector.
class VectorAgent : public Agent {
 public:
  VectorAgent(Representation r, ModelConfig c, int features, Rng& rng)
      : Agent(std::move(c)), representation_(r), features_(features),
        heads_(features, config_, rng) {}

  Representation representation() const override { return representation_; }

  AgentInput Encode(const AgentObservation& o) const override {
    AgentInput in;
    if (representation_ == Representation::kFullState) {
      in.features.reserve(features_);
      for (double h : o.state->heights) in.features.push_back(h / config_.features.depth_scale);
      for (double v : config_.actions.Normalize(o.pose)) in.features.push_back(v);
    } else {
      in.features = DownsampleRgbd(*o.obs, kRgbdSide, config_.features);
    }
    if (static_cast<int>(in.features.size()) != features_) {
      throw ShapeError("agent input has " + std::to_string(in.features.size()) +
                       " features, expected " + std::to_string(features_));
    }
    return in;
  }

  AgentOutput Forward(Tape& tape, const std::vector<AgentInput>& inputs, bool train) override {
    std::vector<double> x;
    x.reserve(inputs.size() * features_);
    for (const AgentInput& in : inputs) x.insert(x.end(), in.features.begin(), in.features.end());
    return heads_.Apply(tape, tape.Constant(Tensor(static_cast<int>(inputs.size()), features_, x)),
                        train);
  }

  std::vector<Tensor*> Parameters() override {
    std::vector<Tensor*> out;
    heads_.Collect(out);
    return out;
  }

  static constexpr int kRgbdSide = 32;

 private:
  Representation representation_;
  int features_;
  Heads heads_;
};

// Two object-only message-passing layers, mean pooled; the goal graph goes
// through the same encoder.
class HomoGraphAgent : public Agent {
 public:
  HomoGraphAgent(ModelConfig c, const ObjectSubgraph& goal, Rng& rng)
      : Agent(std::move(c)), goal_(MakeGoalInstance(goal, config_)),
        heads_(2 * config_.hidden_dim, config_, rng) {
    for (int l = 0; l < 2; ++l) {
      const int in = l == 0 ? config_.obj_attr_dim : config_.hidden_dim;
      layers_[l] = {Glorot(in, config_.hidden_dim, rng), Glorot(in, config_.hidden_dim, rng),
                    Zeros(1, config_.hidden_dim)};
    }
  }

  Representation representation() const override { return Representation::kHomoGraph; }
  bool NeedsGraph() const override { return true; }

  AgentInput Encode(const AgentObservation& o) const override {
    return {MakeGoalInstance(*o.subgraph, config_), {}};
  }

  AgentOutput Forward(Tape& tape, const std::vector<AgentInput>& inputs, bool train) override {
    std::vector<GraphInstance> graphs;
    for (const AgentInput& in : inputs) graphs.push_back(in.graph);
    const GraphBatch batch = GraphBatch::Build(graphs);
    Var state = Encode(tape, batch, train);
    Var goal = RepeatRows(Encode(tape, GraphBatch::Build({goal_}), train), batch.num_graphs);
    return heads_.Apply(tape, ConcatCols({state, goal}), train);
  }

  std::vector<Tensor*> Parameters() override {
    std::vector<Tensor*> out;
    for (Layer& l : layers_) {
      for (Tensor* t : {&l.self, &l.neighbor, &l.bias}) out.push_back(t);
    }
    heads_.Collect(out);
    return out;
  }

 private:
  struct Layer {
    Tensor self, neighbor, bias;
  };

  Var Encode(Tape& tape, const GraphBatch& batch, bool train) {
    Var x = tape.Constant(batch.obj_x);
    for (Layer& l : layers_) {
      x = Tanh(Add(Add(MatMul(x, Bind(tape, l.self, train)),
                       MatMul(SpMM(batch.obj_from_obj, x), Bind(tape, l.neighbor, train))),
                   Bind(tape, l.bias, train)));
    }
    return SpMM(batch.obj_mean, x);
  }

  GraphInstance goal_;
  Layer layers_[2];
  Heads heads_;
};

// The DGform network used as a model-free PPO policy.
class HeteroGraphAgent : public Agent {
 public:
  HeteroGraphAgent(ModelConfig c, const ObjectSubgraph& goal, Rng& rng)
      : Agent(std::move(c)), goal_(MakeGoalInstance(goal, config_)),
        params_(ModelParams::Init(config_, rng)) {}

  Representation representation() const override { return Representation::kHeteroGraph; }
  bool NeedsGraph() const override { return true; }

  AgentInput Encode(const AgentObservation& o) const override {
    return {MakeInstance(*o.subgraph, o.pose, config_), {}};
  }

  AgentOutput Forward(Tape& tape, const std::vector<AgentInput>& inputs, bool train) override {
    std::vector<GraphInstance> graphs;
    for (const AgentInput& in : inputs) graphs.push_back(in.graph);
    const GraphBatch batch = GraphBatch::Build(graphs);
    const ParamVars p =
        train ? ParamVars::Bind(tape, params_) : ParamVars::BindConstant(tape, params_);
    const Hidden h = HeteroGcnForward(tape, batch, p);
    const PolicyOutput pol =
        PolicyHead(h, batch, EncodeGoal(tape, GraphBatch::Build({goal_}), p), p);
    return {pol.mean, pol.log_std, ValueHead(h, batch, p)};
  }

  std::vector<Tensor*> Parameters() override { return params_.All(); }

 private:
  GraphInstance goal_;
  ModelParams params_;
};

double ValueOf(Agent& agent, const AgentInput& input) {
  if (!agent.Learns()) return 0.0;
  Tape tape;
  return agent.Forward(tape, {input}, false).value.value().item();
}

}  // namespace

std::string RepresentationName(Representation r) {
  switch (r) {
    case Representation::kRandom:
      return "random";
    case Representation::kFullState:
      return "ppo-full";
    case Representation::kRgbd:
      return "ppo-rgbd";
    case Representation::kHomoGraph:
      return "ppo-homo";
    case Representation::kHeteroGraph:
      return "ppo-hetero";
  }
  return "?";
}

Agent::Decision Agent::Act(const AgentInput& input, Rng& rng, bool deterministic) {
  Tape tape;
  const AgentOutput out = Forward(tape, {input}, false);
  const Tensor& mean = out.mean.value();
  const Tensor& log_std = out.log_std.value();
  const ActionDistribution dist{{mean.data().begin(), mean.data().end()},
                                {log_std.data().begin(), log_std.data().end()}};
  return {SampleAction(dist, rng, deterministic), out.value.value().item()};
}

std::unique_ptr<Agent> MakeAgent(Representation r, const EnvConfig& env, int hidden_dim,
                                 const ObjectSubgraph& goal, Rng& rng) {
  ModelConfig c = ModelConfig::ForEnv(env);
  c.hidden_dim = hidden_dim;
  c.Validate();
  switch (r) {
    case Representation::kRandom:
      return std::make_unique<RandomAgent>(c);
    case Representation::kFullState:
      return std::make_unique<VectorAgent>(
          r, c, env.grid_size * env.grid_size + BimanualPose::kDim, rng);
    case Representation::kRgbd:
      return std::make_unique<VectorAgent>(
          r, c, 4 * VectorAgent::kRgbdSide * VectorAgent::kRgbdSide, rng);
    case Representation::kHomoGraph:
      return std::make_unique<HomoGraphAgent>(c, goal, rng);
    case Representation::kHeteroGraph:
      return std::make_unique<HeteroGraphAgent>(c, goal, rng);
  }
  throw ContractError("unknown representation");
}

std::vector<double> DownsampleRgbd(const RgbdObs& obs, int side,
                                   const ObjectFeatureScaling& scaling) {
  if (side < 1 || obs.height < side || obs.width < side) {
    throw ContractError("downsample: image smaller than the target");
  }
  std::vector<double> out(4 * side * side, 0.0);
  std::vector<int> count(side * side, 0);
  for (int r = 0; r < obs.height; ++r) {
    const int br = r * side / obs.height;
    for (int c = 0; c < obs.width; ++c) {
      const int cell = br * side + c * side / obs.width;
      const std::uint8_t* px = obs.pixel(r, c);
      for (int ch = 0; ch < 3; ++ch) out[ch * side * side + cell] += px[ch] / 255.0;
      out[3 * side * side + cell] +=
          (scaling.depth_reference - obs.depth_at(r, c)) / scaling.depth_scale;
      ++count[cell];
    }
  }
  for (int ch = 0; ch < 4; ++ch) {
    for (int cell = 0; cell < side * side; ++cell) out[ch * side * side + cell] /= count[cell];
  }
  return out;
}

namespace {

struct PeriodData {
  std::vector<AgentInput> inputs;
  std::vector<double> actions, logp, values, rewards;
  MetricSnapshot last;
  bool done = false;
  AgentInput final_input;
};

// One period from the pin's start pose; `state` advances in place.
PeriodData RunPeriod(Agent& agent, const DoughEnv& env, DoughState& state, int period,
                     Rng& rng, bool deterministic, std::optional<ObjectSubgraph>& sub,
                     PeriodRecord* record) {
  PeriodData data;
  state = env.ResetPin(std::move(state));
  RgbdObs obs = env.Render(state);
  BimanualPose pose = env.StartAction();
  auto observe = [&]() {
    if (agent.NeedsGraph()) sub = Observe(obs, env.config(), sub);
    return agent.Encode({&state, &obs, sub ? &*sub : nullptr, pose});
  };
  for (int t = 0; t < period && !data.done; ++t) {
    AgentInput input = observe();
    const Agent::Decision d = agent.Act(input, rng, deterministic);
    pose = agent.config().actions.Denormalize(d.sample.action);
    StepResult r = env.Step(state, pose);
    data.inputs.push_back(std::move(input));
    data.actions.insert(data.actions.end(), d.sample.action.begin(), d.sample.action.end());
    data.logp.push_back(d.sample.logprob);
    data.values.push_back(d.value);
    data.rewards.push_back(r.reward);
    data.last = r.metrics;
    data.done = r.done;
    if (record != nullptr) {
      record->poses.push_back(pose);
      record->rewards.push_back(r.reward);
    }
    state = std::move(r.state);
    obs = std::move(r.obs);
  }
  if (!data.done) data.final_input = observe();
  return data;
}

}  // namespace

EpisodeResult RunAgentEpisode(Agent& agent, const DoughEnv& env, int period,
                              std::uint64_t env_seed, Rng& rng, bool deterministic) {
  if (period < 1) throw ContractError("episode period must be >= 1");
  EpisodeResult result;
  DoughState state = env.Reset(env_seed).first;
  result.initial = env.Metrics(state);
  std::optional<ObjectSubgraph> sub;
  bool done = false;
  while (!done) {
    PeriodRecord record;
    const PeriodData data = RunPeriod(agent, env, state, period, rng, deterministic, sub, &record);
    for (double r : data.rewards) result.total_reward += r;
    record.metrics = env.Metrics(state);
    result.periods.push_back(std::move(record));
    done = data.done;
  }
  result.final = env.Metrics(state);
  result.final_state = std::move(state);
  return result;
}

AgentTrainer::AgentTrainer(Representation r, const TrainConfig& config)
    : config_((config.Validate(), config)),
      env_(config_.env),
      goal_(GoalSubgraph(env_)),
      rng_(Rng::Derive(config_.seed, 1)) {
  Rng init(Rng::Derive(config_.seed, 0));
  agent_ = MakeAgent(r, config_.env, config_.hidden_dim, goal_, init);
  if (agent_->Learns()) {
    adam_ = std::make_unique<Adam>(agent_->Parameters(), AdamOptions{.lr = config_.lr});
  }
}

UpdateMetrics AgentTrainer::Step() {
  if (!state_) state_ = env_.Reset(Rng::Derive(config_.seed, 100000 + episode_)).first;
  std::optional<ObjectSubgraph> sub;
  PeriodData data =
      RunPeriod(*agent_, env_, *state_, config_.horizon, rng_, false, sub, nullptr);
  const double bootstrap = data.done ? 0.0 : ValueOf(*agent_, data.final_input);
  if (data.done) {
    state_.reset();
    ++episode_;
  }

  UpdateMetrics m;
  m.update = update_++;
  const int n = static_cast<int>(data.rewards.size());
  double reward_sum = 0.0;
  for (double r : data.rewards) reward_sum += r;
  m.reward_mean = reward_sum / n;
  m.iou = data.last.iou;
  m.sdf = data.last.sdf;
  m.density = data.last.density;
  if (!agent_->Learns()) return m;

  const GaeResult gae =
      ComputeGae(data.rewards, data.values, bootstrap, config_.gamma, config_.lambda);
  const Tensor actions(n, agent_->config().action_dim(), data.actions);
  const Tensor logp_old(n, 1, data.logp);
  const Tensor adv(n, 1, gae.advantages);
  const Tensor ret(n, 1, gae.returns);
  const std::vector<Tensor*> params = agent_->Parameters();
  std::vector<Tensor> backup;
  for (const Tensor* t : params) backup.push_back(*t);
  const AdamState adam_backup = adam_->state();
  try {
    for (int e = 0; e < config_.ppo_epochs; ++e) {
      adam_->ZeroGrad();
      Tape tape;
      const AgentOutput out = agent_->Forward(tape, data.inputs, true);
      Var clip = ClipLoss(GaussianLogProb(out.mean, out.log_std, actions), logp_old, adv,
                          config_.weights.clip_eps);
      Var vf = ValueLoss(out.value, ret);
      Var ent = EntropyTerm(out.log_std);
      Var total = Add(Add(clip, Scale(vf, config_.weights.c1)), Scale(ent, -config_.weights.c3));
      for (auto [name, v] : {std::pair{"loss_clip", clip}, {"loss_vf", vf}, {"entropy", ent},
                             {"total", total}}) {
        if (!std::isfinite(v.value().item())) throw TrainingError(name, "non-finite loss");
      }
      tape.Backward(total);
      adam_->Step();
      m.loss_clip += clip.value().item() / config_.ppo_epochs;
      m.loss_vf += vf.value().item() / config_.ppo_epochs;
      m.entropy += ent.value().item() / config_.ppo_epochs;
    }
    for (const Tensor* t : params) {
      if (!t->AllFinite()) throw TrainingError("params", "non-finite parameter after update");
    }
  } catch (const TrainingError&) {
    for (size_t i = 0; i < params.size(); ++i) *params[i] = backup[i];
    adam_->set_state(adam_backup);
    throw;
  }
  return m;
}

}  // namespace dgform
