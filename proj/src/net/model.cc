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

#include "dgform/net/model.h"

#include <cmath>
#include <numbers>

#include "dgform/common/error.h"

namespace dgform {
namespace {

constexpr double kLog2Pi = 1.8378770664093453;  // log(2 pi)

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

Tensor ZeroParam(int rows, int cols) { return Param(Tensor(rows, cols)); }

struct Dims {
  int h, d_o, d_m, a, policy_in;
  explicit Dims(const ModelConfig& c)
      : h(c.hidden_dim),
        d_o(c.obj_attr_dim),
        d_m(c.man_attr_dim),
        a(c.action_dim()),
        policy_in(c.num_manipulators * c.hidden_dim + 2 * c.hidden_dim) {}
};

// Builds every tensor through `make(rows, cols, kind)`, kind 0 = weight,
// 1 = bias, 2 = policy output weight.
template <typename Make>
ModelParams Build(const ModelConfig& config, Make make) {
  config.Validate();
  const Dims d(config);
  ModelParams p;
  p.hidden_dim = d.h;
  for (int l = 0; l < 2; ++l) {
    const int in_o = l == 0 ? d.d_o : d.h;
    const int in_m = l == 0 ? d.d_m : d.h;
    GcnLayerParams& g = p.gcn[l];
    g.obj_self = make(in_o, d.h, 0);
    g.obj_from_obj = make(in_o, d.h, 0);
    g.obj_from_man = make(in_m, d.h, 0);
    g.obj_bias = make(1, d.h, 1);
    g.man_self = make(in_m, d.h, 0);
    g.man_from_obj = make(in_o, d.h, 0);
    g.man_bias = make(1, d.h, 1);
    GoalLayerParams& q = p.goal[l];
    q.self = make(in_o, d.h, 0);
    q.from_obj = make(in_o, d.h, 0);
    q.bias = make(1, d.h, 1);
  }
  p.policy = {make(d.policy_in, d.h, 0), make(1, d.h, 1), make(d.h, d.a, 2),
              make(1, d.a, 1)};
  p.log_std = Param(Tensor(1, d.a, config.init_log_std));
  p.transition = {make(2 * d.h, d.h, 0), make(1, d.h, 1), make(d.h, d.d_o, 0),
                  make(1, d.d_o, 1)};
  p.value = {make(d.h, d.h, 0), make(1, d.h, 1), make(d.h, 1, 0), make(1, 1, 1)};
  return p;
}

Var Affine(Var x, Var w, Var b) { return Add(MatMul(x, w), b); }

Var Mlp2(Var x, const ParamVars::Mlp& m) {
  return Affine(Tanh(Affine(x, m.w1, m.b1)), m.w2, m.b2);
}

template <typename Params, typename BindFn>
ParamVars BindWith(Params& params, BindFn bind) {
  ParamVars v;
  for (int l = 0; l < 2; ++l) {
    auto& g = params.gcn[l];
    v.gcn[l] = {bind(g.obj_self), bind(g.obj_from_obj), bind(g.obj_from_man),
                bind(g.obj_bias), bind(g.man_self),     bind(g.man_from_obj),
                bind(g.man_bias)};
    auto& q = params.goal[l];
    v.goal[l] = {bind(q.self), bind(q.from_obj), bind(q.bias)};
  }
  auto mlp = [&](auto& m) -> ParamVars::Mlp {
    return {bind(m.w1), bind(m.b1), bind(m.w2), bind(m.b2)};
  };
  v.policy = mlp(params.policy);
  v.log_std = Clamp(bind(params.log_std), kLogStdMin, kLogStdMax);
  v.transition = mlp(params.transition);
  v.value = mlp(params.value);
  return v;
}

}  // namespace

ActionScaling ActionScaling::ForEnv(const EnvConfig& config) {
  const DoughEnv env(config);
  ActionScaling s;
  s.offset = env.StartAction().ToVector();
  const std::array<double, EePose::kDim> arm = {0.15, 0.15, 0.05, 1, 1, 1, 1};
  for (int k = 0; k < 2; ++k) s.scale.insert(s.scale.end(), arm.begin(), arm.end());
  return s;
}

std::vector<double> ActionScaling::Normalize(const BimanualPose& pose) const {
  std::vector<double> u = pose.ToVector();
  if (u.size() != offset.size()) throw ShapeError("action scaling: width mismatch");
  for (size_t i = 0; i < u.size(); ++i) u[i] = (u[i] - offset[i]) / scale[i];
  return u;
}

BimanualPose ActionScaling::Denormalize(std::span<const double> u) const {
  if (u.size() != offset.size()) throw ShapeError("action scaling: width mismatch");
  std::vector<double> v(u.size());
  for (size_t i = 0; i < u.size(); ++i) v[i] = offset[i] + scale[i] * u[i];
  BimanualPose pose = BimanualPose::FromVector(v);
  for (EePose* arm : {&pose.left, &pose.right}) {
    auto& q = arm->quaternion;
    const double n = std::sqrt(q[0] * q[0] + q[1] * q[1] + q[2] * q[2] + q[3] * q[3]);
    if (n < 1e-12 || !std::isfinite(n)) {
      q = {1.0, 0.0, 0.0, 0.0};
    } else {
      for (double& c : q) c /= n;
    }
  }
  return pose;
}

std::array<double, EePose::kDim> ActionScaling::NodeFeatures(const EePose& pose,
                                                            int arm) const {
  if (offset.size() != BimanualPose::kDim) {
    throw ShapeError("action scaling: node features need two 7-D arms");
  }
  const auto raw = pose.ToArray();
  std::array<double, EePose::kDim> f;
  for (int i = 0; i < EePose::kDim; ++i) {
    const double shared = 0.5 * (offset[i] + offset[EePose::kDim + i]);
    f[i] = (raw[i] - shared) / scale[arm * EePose::kDim + i];
  }
  return f;
}

ObjectFeatureScaling ObjectFeatureScaling::ForEnv(const EnvConfig& config) {
  ObjectFeatureScaling f;
  f.position_scale = 0.5 * config.board_size;
  f.depth_reference = config.camera_height;
  return f;
}

std::array<double, 3> ObjectFeatureScaling::Normalize(const ObjectNode& n) const {
  return {n.x / position_scale, n.y / position_scale,
          (depth_reference - n.depth) / depth_scale};
}

ObjectNode ObjectFeatureScaling::Denormalize(std::span<const double> f) const {
  return {f[0] * position_scale, f[1] * position_scale,
          depth_reference - f[2] * depth_scale};
}

ModelConfig ModelConfig::ForEnv(const EnvConfig& config) {
  ModelConfig m;
  m.features = ObjectFeatureScaling::ForEnv(config);
  m.actions = ActionScaling::ForEnv(config);
  return m;
}

void ModelConfig::Validate() const {
  if (hidden_dim < 1 || obj_attr_dim < 1 || man_attr_dim < 1 ||
      num_manipulators < 1) {
    throw ConfigError("model: dimensions must be positive");
  }
  if (init_log_std < kLogStdMin || init_log_std > kLogStdMax) {
    throw ConfigError("model: init_log_std outside [-5, 2]");
  }
  if (!actions.offset.empty() &&
      (actions.offset.size() != static_cast<size_t>(action_dim()) ||
       actions.scale.size() != actions.offset.size())) {
    throw ConfigError("model: action scaling width differs from action_dim");
  }
  for (double s : actions.scale) {
    if (!(s > 0.0)) throw ConfigError("model: action scale must be positive");
  }
  if (!(features.position_scale > 0.0) || !(features.depth_scale > 0.0)) {
    throw ConfigError("model: feature scales must be positive");
  }
}

ModelParams ModelParams::Init(const ModelConfig& config, Rng& rng) {
  return Build(config, [&](int rows, int cols, int kind) {
    if (kind == 1) return ZeroParam(rows, cols);
    if (kind == 2) {
      Tensor t(rows, cols);
      for (double& v : t.data()) v = config.policy_out_init * rng.Normal();
      return Param(std::move(t));
    }
    return Glorot(rows, cols, rng);
  });
}

ModelParams ModelParams::Zeros(const ModelConfig& config) {
  return Build(config, [](int rows, int cols, int) { return ZeroParam(rows, cols); });
}

namespace {

template <typename Params, typename T>
std::vector<std::pair<std::string, T*>> NamedTensors(Params& self) {
  std::vector<std::pair<std::string, T*>> out;
  auto& gcn = self.gcn;
  auto& goal = self.goal;
  for (int l = 0; l < 2; ++l) {
    const std::string g = "gcn" + std::to_string(l) + ".";
    auto& c = gcn[l];
    out.insert(out.end(), {{g + "obj_self", &c.obj_self},
                           {g + "obj_from_obj", &c.obj_from_obj},
                           {g + "obj_from_man", &c.obj_from_man},
                           {g + "obj_bias", &c.obj_bias},
                           {g + "man_self", &c.man_self},
                           {g + "man_from_obj", &c.man_from_obj},
                           {g + "man_bias", &c.man_bias}});
  }
  for (int l = 0; l < 2; ++l) {
    const std::string g = "goal" + std::to_string(l) + ".";
    out.insert(out.end(), {{g + "self", &goal[l].self},
                           {g + "from_obj", &goal[l].from_obj},
                           {g + "bias", &goal[l].bias}});
  }
  auto mlp = [&](const std::string& name, auto& m) {
    out.insert(out.end(), {{name + ".w1", &m.w1},
                           {name + ".b1", &m.b1},
                           {name + ".w2", &m.w2},
                           {name + ".b2", &m.b2}});
  };
  mlp("policy", self.policy);
  out.emplace_back("policy.log_std", &self.log_std);
  mlp("transition", self.transition);
  mlp("value", self.value);
  return out;
}

}  // namespace

std::vector<std::pair<std::string, Tensor*>> ModelParams::Named() {
  return NamedTensors<ModelParams, Tensor>(*this);
}

std::vector<std::pair<std::string, const Tensor*>> ModelParams::Named() const {
  return NamedTensors<const ModelParams, const Tensor>(*this);
}

std::vector<Tensor*> ModelParams::All() {
  std::vector<Tensor*> out;
  for (auto& [name, t] : Named()) out.push_back(t);
  return out;
}

bool ModelParams::AllFinite() const {
  for (const auto& [name, t] : Named()) {
    if (!t->AllFinite()) return false;
  }
  return true;
}

ParamVars ParamVars::Bind(Tape& tape, ModelParams& params) {
  return BindWith(params, [&](Tensor& t) { return tape.Leaf(t); });
}

ParamVars ParamVars::BindConstant(Tape& tape, const ModelParams& params) {
  return BindWith(params, [&](const Tensor& t) { return tape.Constant(t); });
}

Hidden HeteroGcnForward(Tape& tape, const GraphBatch& batch, const ParamVars& p) {
  if (batch.man_per_graph == 0) {
    throw ContractError("hetero_gcn: graph has no manipulator nodes");
  }
  Var obj = tape.Constant(batch.obj_x);
  Var man = tape.Constant(batch.man_x);
  for (const ParamVars::Gcn& l : p.gcn) {
    Var next_obj = Tanh(Add(
        Add(Affine(obj, l.obj_self, l.obj_bias),
            MatMul(SpMM(batch.obj_from_obj, obj), l.obj_from_obj)),
        MatMul(SpMM(batch.obj_from_man, man), l.obj_from_man)));
    Var next_man = Tanh(Add(Affine(man, l.man_self, l.man_bias),
                            MatMul(SpMM(batch.man_from_obj, obj), l.man_from_obj)));
    obj = next_obj;
    man = next_man;
  }
  return {obj, man};
}

Var EncodeGoal(Tape& tape, const GraphBatch& goals, const ParamVars& p) {
  Var h = tape.Constant(goals.obj_x);
  for (const ParamVars::Goal& l : p.goal) {
    h = Tanh(Add(Affine(h, l.self, l.bias),
                 MatMul(SpMM(goals.obj_from_obj, h), l.from_obj)));
  }
  return SpMM(goals.obj_mean, h);
}

PolicyOutput PolicyHead(const Hidden& h, const GraphBatch& batch, Var goal_emb,
                        const ParamVars& p) {
  const int b = batch.num_graphs;
  Var man_flat = Reshape(h.man, b, batch.man_per_graph * h.man.cols());
  Var obj_pool = SpMM(batch.obj_mean, h.obj);
  if (goal_emb.rows() == 1 && b > 1) goal_emb = RepeatRows(goal_emb, b);
  Var x = ConcatCols({man_flat, obj_pool, goal_emb});
  return {Mlp2(x, p.policy), p.log_std};
}

Var TransitionHead(const Hidden& h, const GraphBatch& batch, const ParamVars& p) {
  Var man_pool = SpMM(batch.man_mean_to_obj, h.man);
  return Mlp2(ConcatCols({h.obj, man_pool}), p.transition);
}

Var ValueHead(const Hidden& h, const GraphBatch& batch, const ParamVars& p) {
  Var pooled = Add(SpMM(batch.all_mean_obj, h.obj), SpMM(batch.all_mean_man, h.man));
  return Mlp2(pooled, p.value);
}

Var GaussianLogProb(Var mean, Var log_std, const Tensor& actions) {
  Tape& tape = *mean.tape();
  const int a = log_std.cols();
  Var z = Mul(Sub(tape.Constant(actions), mean), Exp(Neg(log_std)));
  Var quad = Scale(SumCols(Square(z)), -0.5);
  return AddScalar(Sub(quad, Sum(log_std)), -0.5 * a * kLog2Pi);
}

Var GaussianEntropy(Var log_std) {
  return AddScalar(Sum(log_std), 0.5 * log_std.cols() * (1.0 + kLog2Pi));
}

ActionSample SampleAction(const ActionDistribution& dist, Rng& rng,
                          bool deterministic) {
  ActionSample s;
  s.action.resize(dist.mean.size());
  for (size_t i = 0; i < dist.mean.size(); ++i) {
    const double eps = deterministic ? 0.0 : rng.Normal();
    s.action[i] = dist.mean[i] + std::exp(dist.log_std[i]) * eps;
  }
  s.logprob = LogProb(dist, s.action);
  return s;
}

double LogProb(const ActionDistribution& dist, std::span<const double> action) {
  if (action.size() != dist.mean.size() || dist.log_std.size() != dist.mean.size()) {
    throw ShapeError("log_prob: action width mismatch");
  }
  double lp = 0.0;
  for (size_t i = 0; i < action.size(); ++i) {
    const double z = (action[i] - dist.mean[i]) * std::exp(-dist.log_std[i]);
    lp += -0.5 * z * z - dist.log_std[i] - 0.5 * kLog2Pi;
  }
  return lp;
}

namespace {

Tensor ObjectFeatures(const ObjectSubgraph& object, const ModelConfig& config) {
  Tensor t(kObjectNodes, 3);
  for (int i = 0; i < kObjectNodes; ++i) {
    const auto f = config.features.Normalize(object.nodes[i]);
    for (int k = 0; k < 3; ++k) t(i, k) = f[k];
  }
  return t;
}

std::vector<std::pair<int, int>> FullBipartite(int n_m, int n_o) {
  std::vector<std::pair<int, int>> e;
  for (int m = 0; m < n_m; ++m) {
    for (int o = 0; o < n_o; ++o) e.emplace_back(m, o);
  }
  return e;
}

void CheckEnvLayout(const ModelConfig& config) {
  if (config.obj_attr_dim != 3 || config.man_attr_dim != EePose::kDim ||
      config.num_manipulators != kManipulatorNodes) {
    throw ContractError("model: env graphs need 3 object attrs and 2 x 7-D poses");
  }
}

}  // namespace

GraphInstance MakeInstance(const ObjectSubgraph& object,
                           const BimanualPose& manipulators,
                           const ModelConfig& config) {
  CheckEnvLayout(config);
  GraphInstance g;
  g.obj = ObjectFeatures(object, config);
  g.man = Tensor(kManipulatorNodes, EePose::kDim);
  const EePose* arms[kManipulatorNodes] = {&manipulators.left, &manipulators.right};
  for (int m = 0; m < kManipulatorNodes; ++m) {
    const auto f = config.actions.NodeFeatures(*arms[m], m);
    std::copy(f.begin(), f.end(), &g.man(m, 0));
  }
  g.oo = ObjectSubgraph::Edges();
  g.mo = FullBipartite(kManipulatorNodes, kObjectNodes);
  return g;
}

GraphInstance MakeInstance(const HeteroGraph& graph, const ModelConfig& config) {
  return MakeInstance(graph.object, {graph.manipulators[0], graph.manipulators[1]},
                      config);
}

GraphInstance MakeGoalInstance(const ObjectSubgraph& goal,
                               const ModelConfig& config) {
  CheckEnvLayout(config);
  GraphInstance g;
  g.obj = ObjectFeatures(goal, config);
  g.man = Tensor(0, config.man_attr_dim);
  g.oo = ObjectSubgraph::Edges();
  return g;
}

Model::Model(ModelConfig config, ModelParams params)
    : config_(std::move(config)), params_(std::move(params)) {
  config_.Validate();
}

Model::Model(const ModelConfig& config, Rng& rng)
    : Model(config, ModelParams::Init(config, rng)) {}

StepEvaluation Model::Evaluate(const HeteroGraph& graph,
                               const ObjectSubgraph& goal) const {
  return Evaluate(MakeInstance(graph, config_), goal);
}

StepEvaluation Model::Evaluate(const GraphInstance& graph,
                               const ObjectSubgraph& goal) const {
  Tape tape;
  const ParamVars p = ParamVars::BindConstant(tape, params_);
  const GraphBatch batch = GraphBatch::Build({graph});
  const GraphBatch goals = GraphBatch::Build({MakeGoalInstance(goal, config_)});
  const Hidden h = HeteroGcnForward(tape, batch, p);
  const PolicyOutput pol = PolicyHead(h, batch, EncodeGoal(tape, goals, p), p);
  StepEvaluation out;
  out.dist.mean = pol.mean.value().storage();
  out.dist.log_std = pol.log_std.value().storage();
  out.value = ValueHead(h, batch, p).value().item();
  return out;
}

ObjectSubgraph Model::PredictNext(const GraphInstance& acted) const {
  Tape tape;
  const ParamVars p = ParamVars::BindConstant(tape, params_);
  const GraphBatch batch = GraphBatch::Build({acted});
  const Tensor pred = TransitionHead(HeteroGcnForward(tape, batch, p), batch, p).value();
  ObjectSubgraph out;
  for (int i = 0; i < kObjectNodes; ++i) {
    const double f[3] = {pred(i, 0), pred(i, 1), pred(i, 2)};
    out.nodes[i] = config_.features.Denormalize(f);
  }
  return out;
}

}  // namespace dgform
