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

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "dgform/common/error.h"
#include "dgform/net/checkpoint.h"
#include "dgform/net/model.h"
#include "dgform/net/rollout.h"
#include "dgform/tensor/adam.h"
#include "support/gradcheck.h"

namespace dgform {
namespace {

using testing::CheckGradients;
using testing::RandomTensor;

const EnvConfig& Env() {
  static const EnvConfig config;
  return config;
}

ModelConfig SmallConfig(int hidden = 4) {
  ModelConfig c = ModelConfig::ForEnv(Env());
  c.hidden_dim = hidden;
  return c;
}

ObjectSubgraph RandomSubgraph(unsigned seed) {
  const Tensor r = RandomTensor(kObjectNodes, 3, seed);
  ObjectSubgraph sub;
  for (int i = 0; i < kObjectNodes; ++i) {
    sub.nodes[i] = {0.15 * r(i, 0), 0.15 * r(i, 1), 0.48 + 0.015 * r(i, 2)};
  }
  return sub;
}

BimanualPose RandomPoses(unsigned seed) {
  const Tensor r = RandomTensor(1, BimanualPose::kDim, seed);
  std::vector<double> v(r.storage());
  BimanualPose pose = BimanualPose::FromVector(v);
  return ActionScaling::ForEnv(Env()).Denormalize(ActionScaling::ForEnv(Env()).Normalize(pose));
}

HeteroGraph RandomGraph(unsigned seed) {
  return BuildHeteroGraph(RandomSubgraph(seed), RandomPoses(seed + 1000));
}

ObjectSubgraph GoalSubgraph() {
  const DoughEnv env(Env());
  return Abstract(env.Render(env.GoalState()), DoughColorBounds(), Env().board_size)
      .subgraph;
}

Tensor HiddenObj(ModelParams& params, const GraphInstance& g) {
  Tape tape;
  const ParamVars p = ParamVars::BindConstant(tape, params);
  return HeteroGcnForward(tape, GraphBatch::Build({g}), p).obj.value();
}

TEST(HeteroGcn, ZeroWeightsGiveZeroHidden) {
  ModelParams params = ModelParams::Zeros(SmallConfig(8));
  Tape tape;
  const ParamVars p = ParamVars::Bind(tape, params);
  const GraphBatch batch =
      GraphBatch::Build({MakeInstance(RandomGraph(1), SmallConfig(8))});
  const Hidden h = HeteroGcnForward(tape, batch, p);
  EXPECT_EQ(h.obj.rows(), 9);
  EXPECT_EQ(h.man.rows(), 2);
  EXPECT_EQ(h.obj.cols(), 8);
  for (double v : h.obj.value().data()) EXPECT_EQ(v, 0.0);
  for (double v : h.man.value().data()) EXPECT_EQ(v, 0.0);
}

TEST(HeteroGcn, NonFiniteAttributesRejected) {
  ObjectSubgraph sub = RandomSubgraph(2);
  sub.nodes[3].depth = NAN;
  EXPECT_THROW(GraphBatch::Build({MakeInstance(BuildHeteroGraph(sub, RandomPoses(3)),
                                               SmallConfig())}),
               ContractError);
}

// Three-node toy graph: objects 0-1 linked, one manipulator linked to object 0.
TEST(HeteroGcn, MatchesHandUnrolledToyGraph) {
  ModelConfig c;
  c.hidden_dim = 1;
  c.obj_attr_dim = 1;
  c.man_attr_dim = 1;
  c.num_manipulators = 1;
  ModelParams params = ModelParams::Zeros(c);
  const double as[2] = {0.7, -0.4}, aoo[2] = {0.3, 0.9}, amo[2] = {-0.5, 0.6},
               bo[2] = {0.1, -0.2}, cs[2] = {1.1, 0.8}, com[2] = {0.25, -0.7},
               bm[2] = {-0.05, 0.3};
  for (int l = 0; l < 2; ++l) {
    params.gcn[l].obj_self[0] = as[l];
    params.gcn[l].obj_from_obj[0] = aoo[l];
    params.gcn[l].obj_from_man[0] = amo[l];
    params.gcn[l].obj_bias[0] = bo[l];
    params.gcn[l].man_self[0] = cs[l];
    params.gcn[l].man_from_obj[0] = com[l];
    params.gcn[l].man_bias[0] = bm[l];
  }
  GraphInstance g;
  g.obj = Tensor(2, 1, {0.8, -0.3});
  g.man = Tensor(1, 1, {0.5});
  g.oo = {{0, 1}};
  g.mo = {{0, 0}};

  double o0 = 0.8, o1 = -0.3, m = 0.5;
  for (int l = 0; l < 2; ++l) {
    const double n0 = std::tanh(as[l] * o0 + aoo[l] * o1 + amo[l] * m + bo[l]);
    const double n1 = std::tanh(as[l] * o1 + aoo[l] * o0 + bo[l]);
    const double nm = std::tanh(cs[l] * m + com[l] * o0 + bm[l]);
    o0 = n0;
    o1 = n1;
    m = nm;
  }
  Tape tape;
  const ParamVars p = ParamVars::BindConstant(tape, params);
  const Hidden h = HeteroGcnForward(tape, GraphBatch::Build({g}), p);
  EXPECT_NEAR(h.obj.value()[0], o0, 1e-15);
  EXPECT_NEAR(h.obj.value()[1], o1, 1e-15);
  EXPECT_NEAR(h.man.value()[0], m, 1e-15);
}

// Node relabelings that preserve the star + ring topology.
std::array<int, kObjectNodes> RingRotation() {
  std::array<int, kObjectNodes> p{0};
  for (int i = 1; i <= 8; ++i) p[i] = i % 8 + 1;
  return p;
}

std::array<int, kObjectNodes> RingReflection() {
  std::array<int, kObjectNodes> p{0};
  for (int i = 1; i <= 8; ++i) p[i] = (8 - (i - 1)) % 8 + 1;
  return p;
}

TEST(HeteroGcn, EquivariantUnderGraphAutomorphisms) {
  const ModelConfig config = SmallConfig(6);
  Rng rng(5);
  const Model model(config, rng);
  ModelParams params = model.params();
  const HeteroGraph g = RandomGraph(7);
  const ObjectSubgraph goal = RandomSubgraph(8);
  const Tensor base = HiddenObj(params, MakeInstance(g, config));
  const double base_value = model.Evaluate(g, goal).value;
  for (const auto& perm : {RingRotation(), RingReflection()}) {
    for (bool swap_arms : {false, true}) {
      HeteroGraph moved = g;
      for (int i = 0; i < kObjectNodes; ++i) moved.object.nodes[perm[i]] = g.object.nodes[i];
      if (swap_arms) std::swap(moved.manipulators[0], moved.manipulators[1]);
      const Tensor h = HiddenObj(params, MakeInstance(moved, config));
      for (int i = 0; i < kObjectNodes; ++i) {
        for (int k = 0; k < config.hidden_dim; ++k) {
          ASSERT_NEAR(h(perm[i], k), base(i, k), 1e-12);
        }
      }
      EXPECT_NEAR(model.Evaluate(moved, goal).value, base_value, 1e-12);
    }
  }
}

Tensor GoalEmbedding(const ModelParams& params, const ObjectSubgraph& goal,
                     const ModelConfig& config) {
  Tape tape;
  const ParamVars p = ParamVars::BindConstant(tape, params);
  return EncodeGoal(tape, GraphBatch::Build({MakeGoalInstance(goal, config)}), p)
      .value();
}

TEST(EncodeGoal, ZeroInputsShapeAndRelabeling) {
  ModelConfig config = SmallConfig(5);
  config.features.depth_reference = 0.0;  // raw zero depth maps to zero input
  Rng rng(3);
  ModelParams params = ModelParams::Init(config, rng);
  const Tensor zero = GoalEmbedding(params, ObjectSubgraph{}, config);
  ASSERT_EQ(zero.rows(), 1);
  ASSERT_EQ(zero.cols(), config.hidden_dim);
  for (double v : zero.data()) EXPECT_EQ(v, 0.0);

  const ObjectSubgraph goal = RandomSubgraph(9);
  const Tensor e = GoalEmbedding(params, goal, config);
  ObjectSubgraph turned = goal;
  const auto perm = RingRotation();
  for (int i = 0; i < kObjectNodes; ++i) turned.nodes[perm[i]] = goal.nodes[i];
  const Tensor e2 = GoalEmbedding(params, turned, config);
  for (int k = 0; k < config.hidden_dim; ++k) EXPECT_NEAR(e2[k], e[k], 1e-12);
}

TEST(PolicyHead, ClampPurityAndWidth) {
  const ModelConfig config = SmallConfig();
  Rng rng(1);
  Model model(config, rng);
  const HeteroGraph g = RandomGraph(4);
  const ObjectSubgraph goal = RandomSubgraph(5);
  const StepEvaluation a = model.Evaluate(g, goal);
  const StepEvaluation b = model.Evaluate(g, goal);
  EXPECT_EQ(a.dist.mean, b.dist.mean);
  EXPECT_EQ(a.value, b.value);
  EXPECT_EQ(a.dist.mean.size(), 14u);
  model.params().log_std[0] = -100.0;
  model.params().log_std[1] = 50.0;
  const StepEvaluation c = model.Evaluate(g, goal);
  EXPECT_EQ(c.dist.log_std[0], kLogStdMin);
  EXPECT_EQ(c.dist.log_std[1], kLogStdMax);
  EXPECT_EQ(c.dist.log_std[2], config.init_log_std);
}

TEST(TransitionAndValue, ZeroWeightsAndBias) {
  const ModelConfig config = SmallConfig();
  ModelParams params = ModelParams::Zeros(config);
  params.value.b2[0] = 0.37;
  Tape tape;
  const ParamVars p = ParamVars::Bind(tape, params);
  const GraphBatch batch = GraphBatch::Build({MakeInstance(RandomGraph(2), config)});
  const Hidden h = HeteroGcnForward(tape, batch, p);
  const Var next = TransitionHead(h, batch, p);
  EXPECT_EQ(next.rows(), 9);
  EXPECT_EQ(next.cols(), 3);
  for (double v : next.value().data()) EXPECT_EQ(v, 0.0);
  EXPECT_EQ(ValueHead(h, batch, p).value().item(), 0.37);
}

TEST(GraphBatch, BatchedEqualsPerGraph) {
  const ModelConfig config = SmallConfig(6);
  Rng rng(11);
  ModelParams params = ModelParams::Init(config, rng);
  std::vector<GraphInstance> graphs;
  for (unsigned s = 0; s < 3; ++s) graphs.push_back(MakeInstance(RandomGraph(20 + s), config));
  Tape tape;
  const ParamVars p = ParamVars::BindConstant(tape, params);
  const GraphBatch batch = GraphBatch::Build(graphs);
  const Hidden h = HeteroGcnForward(tape, batch, p);
  const Tensor values = ValueHead(h, batch, p).value();
  const Tensor next = TransitionHead(h, batch, p).value();
  for (int g = 0; g < 3; ++g) {
    Tape single;
    const ParamVars q = ParamVars::BindConstant(single, params);
    const GraphBatch one = GraphBatch::Build({graphs[g]});
    const Hidden hs = HeteroGcnForward(single, one, q);
    EXPECT_NEAR(ValueHead(hs, one, q).value().item(), values[g], 1e-14);
    const Tensor n1 = TransitionHead(hs, one, q).value();
    for (int i = 0; i < n1.size(); ++i) EXPECT_NEAR(n1[i], next[g * n1.size() + i], 1e-14);
  }
}

// Every head differentiated against every parameter group.
class HeadGradients : public ::testing::Test {
 protected:
  void SetUp() override {
    config_ = SmallConfig(4);
    Rng rng(21);
    params_ = ModelParams::Init(config_, rng);
    for (Tensor* t : params_.All()) {  // nonzero biases exercise every path
      for (double& v : t->data()) v += 0.05 * rng.Normal();
    }
    graphs_ = {MakeInstance(RandomGraph(30), config_), MakeInstance(RandomGraph(31), config_)};
    goal_ = MakeGoalInstance(RandomSubgraph(32), config_);
    actions_ = RandomTensor(2, config_.action_dim(), 33);
    target_ = RandomTensor(18, 3, 34);
  }

  Var Loss(Tape& tape, const ParamVars& p, int head) const {
    const GraphBatch batch = GraphBatch::Build(graphs_);
    const Hidden h = HeteroGcnForward(tape, batch, p);
    if (head == 0) {
      const GraphBatch goals = GraphBatch::Build({goal_});
      const PolicyOutput pol = PolicyHead(h, batch, EncodeGoal(tape, goals, p), p);
      return Add(Sum(GaussianLogProb(pol.mean, pol.log_std, actions_)),
                 Scale(GaussianEntropy(pol.log_std), 0.3));
    }
    if (head == 1) {
      return Mean(Square(Sub(TransitionHead(h, batch, p), tape.Constant(target_))));
    }
    return Sum(Square(ValueHead(h, batch, p)));
  }

  void Check(int head) {
    for (Tensor* t : params_.All()) t->ClearGrad();
    {
      Tape tape;
      tape.Backward(Loss(tape, ParamVars::Bind(tape, params_), head));
    }
    auto named = params_.Named();
    std::vector<std::vector<double>> analytic;
    int with_grad = 0;
    for (auto& [name, t] : named) {
      if (t->has_grad()) {
        ++with_grad;
        analytic.emplace_back(t->grad().begin(), t->grad().end());
      } else {
        analytic.emplace_back(t->size(), 0.0);
      }
    }
    EXPECT_GT(with_grad, 10);
    const auto result = CheckGradients(named, analytic, [&] {
      Tape tape;
      return Loss(tape, ParamVars::BindConstant(tape, params_), head).value().item();
    });
    EXPECT_LT(result.max_rel_error, 1e-4) << "worst " << result.worst;
  }

  ModelConfig config_;
  ModelParams params_;
  std::vector<GraphInstance> graphs_;
  GraphInstance goal_;
  Tensor actions_;
  Tensor target_;
};

TEST_F(HeadGradients, Policy) { Check(0); }
TEST_F(HeadGradients, Transition) { Check(1); }
TEST_F(HeadGradients, Value) { Check(2); }

TEST(TransitionHead, FitsFrozenDoughIdentity) {
  const ModelConfig config = ModelConfig::ForEnv(Env());
  Rng rng(2);
  ModelParams params = ModelParams::Init(config, rng);
  const DoughEnv env(Env());
  std::vector<GraphInstance> graphs;
  std::vector<double> target;
  for (std::uint64_t s = 0; s < 8; ++s) {
    const ObjectSubgraph sub =
        Abstract(env.Reset(s).second, DoughColorBounds(), Env().board_size).subgraph;
    graphs.push_back(MakeInstance(BuildHeteroGraph(sub, env.StartAction()), config));
    target.insert(target.end(), graphs.back().obj.data().begin(),
                  graphs.back().obj.data().end());
  }
  const GraphBatch batch = GraphBatch::Build(graphs);
  const Tensor y(static_cast<int>(graphs.size()) * kObjectNodes, 3, target);
  std::vector<Tensor*> trained;
  for (auto& [name, t] : params.Named()) {
    if (name.starts_with("gcn") || name.starts_with("transition")) trained.push_back(t);
  }
  Adam adam(trained, {.lr = 3e-3});
  double mse = 0.0;
  for (int step = 0; step < 500; ++step) {
    adam.ZeroGrad();
    Tape tape;
    const ParamVars p = ParamVars::Bind(tape, params);
    Var loss = Mean(Square(Sub(TransitionHead(HeteroGcnForward(tape, batch, p), batch, p),
                               tape.Constant(y))));
    mse = loss.value().item();
    tape.Backward(loss);
    adam.Step();
  }
  EXPECT_LT(mse, 1e-3);
}

TEST(SampleAction, DegenerateAndClosedForm) {
  ActionDistribution dist{{0.3, -1.2, 2.0}, {std::log(1e-6), std::log(1e-6), std::log(1e-6)}};
  Rng rng(1);
  const ActionSample s = SampleAction(dist, rng);
  for (int i = 0; i < 3; ++i) EXPECT_NEAR(s.action[i], dist.mean[i], 1e-4);

  dist.log_std = {-0.3, 0.2, 0.0};
  double expected = 0.0;
  for (double ls : dist.log_std) {
    expected += -0.5 * std::log(2 * std::numbers::pi * std::exp(2 * ls));
  }
  EXPECT_NEAR(LogProb(dist, dist.mean), expected, 1e-12);
  const ActionSample m = SampleAction(dist, rng, /*deterministic=*/true);
  EXPECT_EQ(m.action, dist.mean);
  EXPECT_NEAR(m.logprob, expected, 1e-12);
}

TEST(SampleAction, MonteCarloMeanWithinThreeStandardErrors) {
  const ActionDistribution dist{{0.5, -0.25, 1.5, 0.0}, {-0.7, 0.1, -2.0, 0.4}};
  Rng rng(123);
  constexpr int kSamples = 100000;
  std::vector<double> sum(4, 0.0);
  for (int n = 0; n < kSamples; ++n) {
    const ActionSample s = SampleAction(dist, rng);
    for (int i = 0; i < 4; ++i) sum[i] += s.action[i];
  }
  for (int i = 0; i < 4; ++i) {
    const double se = std::exp(dist.log_std[i]) / std::sqrt(kSamples);
    EXPECT_LT(std::abs(sum[i] / kSamples - dist.mean[i]), 3 * se) << i;
  }
}

TEST(ModelRollout, HorizonOneAndDeterminism) {
  const ModelConfig config = SmallConfig(8);
  Rng init(4);
  const Model model(config, init);
  const HeteroGraph g0 = RandomGraph(40);
  const ObjectSubgraph goal = RandomSubgraph(41);
  Rng r1(9);
  const ModelRollout one = RunModelRollout(model, g0, goal, 1, r1);
  EXPECT_EQ(one.steps.size(), 1u);
  EXPECT_FALSE(one.truncated);
  EXPECT_THROW(RunModelRollout(model, g0, goal, 0, r1), ContractError);

  for (bool deterministic : {true, false}) {
    Rng a(17), b(17);
    const ModelRollout ra = RunModelRollout(model, g0, goal, 50, a, deterministic);
    const ModelRollout rb = RunModelRollout(model, g0, goal, 50, b, deterministic);
    ASSERT_EQ(ra.steps.size(), 50u);
    for (int t = 0; t < 50; ++t) {
      EXPECT_EQ(ra.steps[t].action, rb.steps[t].action);
      EXPECT_EQ(ra.steps[t].predicted, rb.steps[t].predicted);
      EXPECT_EQ(ra.steps[t].logprob, rb.steps[t].logprob);
    }
  }
}

TEST(ModelRollout, NonFinitePredictionTruncates) {
  const ModelConfig config = SmallConfig(4);
  Rng init(4);
  const Model model(config, init);
  int calls = 0;
  Rng rng(1);
  const ModelRollout r = RunModelRollout(
      model, RandomGraph(1), RandomSubgraph(2), 10, rng, false,
      [&](const HeteroGraph& acted) {
        ObjectSubgraph next = acted.object;
        if (++calls == 4) next.nodes[2].x = INFINITY;
        return next;
      });
  EXPECT_TRUE(r.truncated);
  EXPECT_EQ(r.steps.size(), 3u);
}

// With the environment in place of the transition head the imagined rollout
// is the on-policy rollout.
TEST(ModelRollout, OracleSwapReproducesOnPolicyRollout) {
  const DoughEnv env(Env());
  const ModelConfig config = SmallConfig(8);
  Rng init(6);
  const Model model(config, init);
  const ObjectSubgraph goal = GoalSubgraph();
  auto [state0, obs0] = env.Reset(3);
  const ObjectSubgraph sub0 = Abstract(obs0, DoughColorBounds(), Env().board_size).subgraph;
  const HeteroGraph g0 = BuildHeteroGraph(sub0, env.StartAction());
  constexpr int kH = 12;

  DoughState imagined = state0;
  Rng r1(55);
  const ModelRollout swapped = RunModelRollout(
      model, g0, goal, kH, r1, false, [&](const HeteroGraph& acted) {
        StepResult s = env.Step(imagined, {acted.manipulators[0], acted.manipulators[1]});
        imagined = s.state;
        return Abstract(s.obs, DoughColorBounds(), Env().board_size).subgraph;
      });

  DoughState real = state0;
  HeteroGraph g = g0;
  Rng r2(55);
  ASSERT_EQ(swapped.steps.size(), static_cast<size_t>(kH));
  for (int t = 0; t < kH; ++t) {
    const StepEvaluation eval = model.Evaluate(g, goal);
    const ActionSample a = SampleAction(eval.dist, r2);
    const BimanualPose pose = config.actions.Denormalize(a.action);
    const StepResult s = env.Step(real, pose);
    real = s.state;
    const ObjectSubgraph sub = Abstract(s.obs, DoughColorBounds(), Env().board_size).subgraph;
    EXPECT_EQ(swapped.steps[t].action, a.action);
    EXPECT_EQ(swapped.steps[t].logprob, a.logprob);
    EXPECT_EQ(swapped.steps[t].value, eval.value);
    EXPECT_EQ(swapped.steps[t].predicted, sub);
    g = BuildHeteroGraph(sub, pose);
  }
  EXPECT_EQ(imagined, real);
}

TEST(ActionScaling, StartPoseIsOriginAndQuaternionReprojected) {
  const ActionScaling s = ActionScaling::ForEnv(Env());
  const DoughEnv env(Env());
  for (double u : s.Normalize(env.StartAction())) EXPECT_NEAR(u, 0.0, 1e-15);
  std::vector<double> u(14, 0.0);
  u[3] = 1.0;  // left quaternion w doubled before projection
  u[4] = 2.0;
  const BimanualPose p = s.Denormalize(u);
  const auto& q = p.left.quaternion;
  EXPECT_NEAR(q[0] * q[0] + q[1] * q[1] + q[2] * q[2] + q[3] * q[3], 1.0, 1e-14);
  EXPECT_NEAR(q[0], q[1], 1e-14);
}

TEST(Checkpoint, RoundTripIsExact) {
  const ModelConfig config = SmallConfig(5);
  Rng rng(8);
  Checkpoint ck;
  ck.config = config;
  ck.params = ModelParams::Init(config, rng);
  ck.alpha = 0.731;
  ck.seed = 42;
  ck.update = 17;
  ck.rng_state = rng.SaveState();
  ck.hyperparameters = {{"lr", 3e-4}, {"horizon", 50}};
  AdamState adam;
  adam.step = 3;
  adam.first_moment = {{0.1, 0.2}, {1e-300}};
  adam.second_moment = {{0.3, 0.4}, {5.0}};
  ck.optimizer = adam;
  const std::string path = ::testing::TempDir() + "/ck.json";
  SaveCheckpoint(path, ck);
  Checkpoint back = LoadCheckpoint(path);
  EXPECT_EQ(back.config, ck.config);
  EXPECT_EQ(back.alpha, ck.alpha);
  EXPECT_EQ(back.seed, 42u);
  EXPECT_EQ(back.update, 17);
  EXPECT_EQ(back.hyperparameters, ck.hyperparameters);
  ASSERT_TRUE(back.optimizer.has_value());
  EXPECT_EQ(back.optimizer->first_moment, adam.first_moment);
  EXPECT_EQ(back.optimizer->step, 3);
  auto a = ck.params.Named();
  auto b = back.params.Named();
  for (size_t i = 0; i < a.size(); ++i) {
    EXPECT_EQ(a[i].second->storage(), b[i].second->storage()) << a[i].first;
  }
  Rng resumed(0);
  resumed.LoadState(back.rng_state);
  EXPECT_EQ(resumed.Uniform(), rng.Uniform());
}

TEST(Checkpoint, RejectsWrongVersionAndShape) {
  const ModelConfig config = SmallConfig(3);
  Rng rng(1);
  Checkpoint ck;
  ck.config = config;
  ck.params = ModelParams::Init(config, rng);
  nlohmann::json j = CheckpointToJson(ck);
  nlohmann::json old = j;
  old["version"] = "dgform-checkpoint/0";
  EXPECT_THROW(CheckpointFromJson(old), VersionError);
  nlohmann::json bad = j;
  bad["params"]["value.w1"]["rows"] = 2;
  bad["params"]["value.w1"]["data"] = std::vector<double>(6, 0.0);
  EXPECT_THROW(CheckpointFromJson(bad), ParseError);
  EXPECT_THROW(LoadCheckpoint("/nonexistent/ck.json"), ConfigError);
}

}  // namespace
}  // namespace dgform
