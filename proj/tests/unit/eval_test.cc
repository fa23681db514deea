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
#include <filesystem>
#include <fstream>

#include "dgform/common/error.h"
#include "dgform/eval/ablation.h"
#include "dgform/eval/agents.h"
#include "support/gradcheck.h"

namespace dgform {
namespace {

using testing::CheckGradients;

EnvConfig ShortEnv() {
  EnvConfig env;
  env.horizon = 12;
  return env;
}

TrainConfig TinyTrain(std::uint64_t seed) {
  TrainConfig c;
  c.env = ShortEnv();
  c.hidden_dim = 8;
  c.horizon = 5;
  c.updates = 2;
  c.num_demos = 1;
  c.demo_batch = 8;
  c.seed = seed;
  return c;
}

const Representation kLearned[] = {Representation::kFullState, Representation::kRgbd,
                                   Representation::kHomoGraph, Representation::kHeteroGraph};

// Two observations from a short random walk.
std::vector<AgentInput> SampleInputs(const Agent& agent, const DoughEnv& env) {
  auto [state, obs] = env.Reset(3);
  std::vector<AgentInput> inputs;
  BimanualPose pose = env.StartAction();
  for (int t = 0; t < 2; ++t) {
    const ObjectSubgraph sub = Abstract(obs, DoughColorBounds(), env.config().board_size).subgraph;
    inputs.push_back(agent.Encode({&state, &obs, &sub, pose}));
    pose.left.position[2] -= 0.03;
    pose.right.position[2] -= 0.03;
    StepResult r = env.Step(state, pose);
    state = std::move(r.state);
    obs = std::move(r.obs);
  }
  return inputs;
}

TEST(DownsampleRgbd, MatchesBlockAverage) {
  RgbdObs obs;
  obs.height = obs.width = 4;
  for (int i = 0; i < 16; ++i) {
    obs.rgb.insert(obs.rgb.end(), {static_cast<std::uint8_t>(i * 10),
                                   static_cast<std::uint8_t>(255 - i), 0});
    obs.depth.push_back(0.5 - 0.001 * i);
  }
  const ObjectFeatureScaling s;
  const std::vector<double> f = DownsampleRgbd(obs, 2, s);
  ASSERT_EQ(f.size(), 16u);
  // block (1, 0) holds pixels 8, 9, 12, 13
  const double red = (80 + 90 + 120 + 130) / 4.0 / 255.0;
  const double depth = (0.001 * (8 + 9 + 12 + 13) / 4.0) / s.depth_scale;
  EXPECT_NEAR(f[0 * 4 + 2], red, 1e-12);
  EXPECT_NEAR(f[3 * 4 + 2], depth, 1e-12);
  EXPECT_NEAR(f[2 * 4 + 3], 0.0, 1e-12);
  EXPECT_THROW(DownsampleRgbd(obs, 8, s), ContractError);
}

// Batched and single-row products round differently.
TEST(Agents, ForwardShapesAndDeterministicMean) {
  const DoughEnv env(ShortEnv());
  const ObjectSubgraph goal = GoalSubgraph(env);
  for (Representation r : kLearned) {
    SCOPED_TRACE(RepresentationName(r));
    Rng init(1);
    auto agent = MakeAgent(r, env.config(), 8, goal, init);
    EXPECT_EQ(agent->representation(), r);
    const std::vector<AgentInput> inputs = SampleInputs(*agent, env);
    Tape tape;
    const AgentOutput out = agent->Forward(tape, inputs, false);
    EXPECT_EQ(out.mean.rows(), 2);
    EXPECT_EQ(out.mean.cols(), agent->config().action_dim());
    EXPECT_EQ(out.log_std.rows(), 1);
    EXPECT_EQ(out.value.rows(), 2);
    EXPECT_EQ(out.value.cols(), 1);
    Rng rng(2);
    const Agent::Decision d = agent->Act(inputs[1], rng, true);
    for (int i = 0; i < out.mean.cols(); ++i) {
      EXPECT_NEAR(d.sample.action[i], out.mean.value()(1, i), 1e-12);
    }
    EXPECT_NEAR(d.value, out.value.value()(1, 0), 1e-12);
    EXPECT_NEAR(out.log_std.value()[0], agent->config().init_log_std, 1e-12);
  }
}

TEST(Agents, GradientsMatchFiniteDifferences) {
  const DoughEnv env(ShortEnv());
  const ObjectSubgraph goal = GoalSubgraph(env);
  for (Representation r : kLearned) {
    SCOPED_TRACE(RepresentationName(r));
    Rng init(4);
    auto agent = MakeAgent(r, env.config(), 4, goal, init);
    const std::vector<AgentInput> inputs = SampleInputs(*agent, env);
    const Tensor mean_w = testing::RandomTensor(2, agent->config().action_dim(), 9);
    const Tensor value_w = testing::RandomTensor(2, 1, 10);
    auto build = [&](Tape& tape, bool train) {
      const AgentOutput out = agent->Forward(tape, inputs, train);
      return Add(Add(Sum(Mul(out.mean, tape.Constant(mean_w))),
                     Sum(Mul(out.value, tape.Constant(value_w)))),
                 Sum(out.log_std));
    };
    std::vector<std::pair<std::string, Tensor*>> named;
    std::vector<std::vector<double>> analytic;
    const std::vector<Tensor*> params = agent->Parameters();
    for (Tensor* p : params) p->ZeroGrad();
    {
      Tape tape;
      tape.Backward(build(tape, true));
    }
    for (size_t i = 0; i < params.size(); ++i) {
      named.emplace_back("p" + std::to_string(i), params[i]);
      analytic.emplace_back(params[i]->grad().begin(), params[i]->grad().end());
    }
    const auto check = CheckGradients(named, analytic, [&] {
      Tape tape;
      return build(tape, false).value().item();
    }, 1e-5, 40);
    EXPECT_LT(check.max_rel_error, 1e-4) << check.worst;
    EXPECT_GT(check.checked, 0);
  }
}

TEST(Agents, RandomAgentIsUniform) {
  const DoughEnv env(ShortEnv());
  Rng init(0);
  auto agent = MakeAgent(Representation::kRandom, env.config(), 8, GoalSubgraph(env), init);
  EXPECT_FALSE(agent->Learns());
  EXPECT_TRUE(agent->Parameters().empty());
  Rng rng(5);
  double lo = 1.0, hi = -1.0;
  for (int i = 0; i < 200; ++i) {
    const Agent::Decision d = agent->Act({}, rng, true);
    for (double u : d.sample.action) {
      lo = std::min(lo, u);
      hi = std::max(hi, u);
    }
    EXPECT_NEAR(d.sample.logprob, -14 * std::log(2.0), 1e-12);
  }
  EXPECT_GE(lo, -1.0);
  EXPECT_LE(hi, 1.0);
  EXPECT_LT(lo, -0.9);
  EXPECT_GT(hi, 0.9);
}

TEST(RunAgentEpisode, PeriodsCoverTheHorizon) {
  const DoughEnv env(ShortEnv());
  Rng init(0);
  auto agent = MakeAgent(Representation::kHomoGraph, env.config(), 8, GoalSubgraph(env), init);
  Rng rng(1);
  const EpisodeResult e = RunAgentEpisode(*agent, env, 5, 77, rng, true);
  ASSERT_EQ(e.periods.size(), 3u);
  EXPECT_EQ(e.periods[0].poses.size(), 5u);
  EXPECT_EQ(e.periods[2].poses.size(), 2u);
  double total = 0.0;
  for (const PeriodRecord& p : e.periods) {
    for (double r : p.rewards) total += r;
  }
  EXPECT_NEAR(total, e.total_reward, 1e-9);
  Rng rng2(1);
  const EpisodeResult again = RunAgentEpisode(*agent, env, 5, 77, rng2, true);
  EXPECT_EQ(again.total_reward, e.total_reward);
}

TEST(AgentTrainer, StepsAreFiniteAndDeterministic) {
  for (Representation r : kLearned) {
    SCOPED_TRACE(RepresentationName(r));
    AgentTrainer a(r, TinyTrain(3));
    AgentTrainer b(r, TinyTrain(3));
    for (int u = 0; u < 3; ++u) {
      const UpdateMetrics ma = a.Step();
      const UpdateMetrics mb = b.Step();
      EXPECT_EQ(MetricsCsvRow(ma), MetricsCsvRow(mb));
      EXPECT_TRUE(std::isfinite(ma.loss_clip));
      EXPECT_TRUE(std::isfinite(ma.loss_vf));
      EXPECT_EQ(ma.update, u);
    }
  }
}

AblationConfig TinyAblation() {
  AblationConfig c;
  c.train = TinyTrain(0);
  c.train.updates = 1;
  c.seeds = {1, 0};
  c.eval_episodes = 1;
  return c;
}

TEST(Ablation, OneSortedRowPerVariantAndSeed) {
  AblationConfig c = TinyAblation();
  c.variants = {"ppo-rgbd", "random", "dgform-il"};
  const std::vector<AblationRow> rows = RunAblation(c);
  ASSERT_EQ(rows.size(), 6u);
  const char* order[] = {"dgform-il", "dgform-il", "ppo-rgbd", "ppo-rgbd", "random", "random"};
  for (size_t i = 0; i < rows.size(); ++i) {
    EXPECT_EQ(rows[i].variant, order[i]);
    EXPECT_EQ(rows[i].seed, i % 2);
    EXPECT_FALSE(rows[i].diverged);
    EXPECT_GE(rows[i].report.iou, 0.0);
    EXPECT_LE(rows[i].report.iou, 1.0);
    EXPECT_GE(rows[i].report.sdf, 0.0);
    EXPECT_GE(rows[i].report.density, 0.0);
    EXPECT_EQ(rows[i].report.episodes.size(), 1u);
  }
}

std::string WithoutTime(AblationRow row) {
  row.wall_time_s = 0.0;
  return AblationCsvRow(row);
}

TEST(Ablation, IdenticalSeedsGiveIdenticalRows) {
  AblationConfig c = TinyAblation();
  for (const std::string& v : AblationVariants()) {
    SCOPED_TRACE(v);
    const AblationRow a = RunVariant(v, 4, c);
    const AblationRow b = RunVariant(v, 4, c);
    EXPECT_EQ(WithoutTime(a), WithoutTime(b));
    EXPECT_TRUE(std::isfinite(a.report.reward_total));
  }
}

TEST(Ablation, RejectsBadConfig) {
  AblationConfig c = TinyAblation();
  c.variants = {"ppo-x"};
  EXPECT_THROW(RunAblation(c), ConfigError);
  c = TinyAblation();
  c.seeds.clear();
  EXPECT_THROW(RunAblation(c), ConfigError);
  c = TinyAblation();
  c.eval_episodes = 0;
  EXPECT_THROW(RunAblation(c), ConfigError);
}

TEST(Ablation, CsvRoundtripAndErrors) {
  const auto dir = std::filesystem::temp_directory_path() / "dgform_eval_test";
  std::filesystem::create_directories(dir);
  std::vector<AblationRow> rows(2);
  rows[0].variant = "random";
  rows[0].seed = 12345678901234ull;
  rows[0].report.reward_total = -3.25;
  rows[0].report.iou = 0.125;
  rows[1].variant = "dgform";
  rows[1].report.density = 1e-5;
  rows[1].wall_time_s = 2.5;
  const std::string path = (dir / "report.csv").string();
  WriteAblationCsv(path, rows);
  {
    std::ifstream in(path);
    std::string header;
    std::getline(in, header);
    EXPECT_EQ(header, "variant,seed,reward,iou,sdf,density,wall_time_s");
  }
  const std::vector<AblationRow> back = ReadAblationCsv(path);
  ASSERT_EQ(back.size(), 2u);
  for (size_t i = 0; i < 2; ++i) EXPECT_EQ(AblationCsvRow(back[i]), AblationCsvRow(rows[i]));

  std::ofstream(path) << AblationCsvHeader() << "\nrandom,0,1,2,3,4,5\nrandom,0,1,x,3,4,5\n";
  try {
    ReadAblationCsv(path);
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_NE(std::string(e.what()).find("line 3"), std::string::npos) << e.what();
  }
  std::ofstream(path) << "a,b\n";
  EXPECT_THROW(ReadAblationCsv(path), ParseError);
}

TEST(Ablation, CheckpointGivesSingleRow) {
  TrainConfig c = TinyTrain(6);
  c.updates = 1;
  const TrainResult trained = Train(c);
  const AblationRow row = EvaluateCheckpoint(trained.final, 1);
  EXPECT_EQ(row.variant, "dgform-il");
  EXPECT_EQ(row.seed, 6u);
  AblationConfig ac = TinyAblation();
  ac.train = c;
  const AblationRow direct = RunVariant("dgform-il", 6, ac);
  EXPECT_EQ(WithoutTime(row), WithoutTime(direct));
}

}  // namespace
}  // namespace dgform
