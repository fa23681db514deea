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

#include "dgform/trainer/demos.h"

#include <cmath>
#include <fstream>
#include <map>

#include "dgform/common/error.h"
#include "dgform/common/rng.h"
#include "dgform/percept/graph_io.h"
#include "json.hpp"

namespace dgform {
namespace {

using nlohmann::json;

void CheckFinite(const DemoStep& step, int line) {
  for (double v : step.zeta.ToVector()) {
    if (!std::isfinite(v)) throw ParseError("non-finite zeta", line);
  }
  for (const ObjectNode& n : step.subgraph.nodes) {
    if (!std::isfinite(n.x) || !std::isfinite(n.y) || !std::isfinite(n.depth)) {
      throw ParseError("non-finite subgraph attribute", line);
    }
  }
}

}  // namespace

int DemoDataset::NumSteps() const {
  int n = 0;
  for (const DemoRollout& r : rollouts) n += static_cast<int>(r.steps.size());
  return n;
}

DemoDataset LoadDemonstrations(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open demonstrations '" + path + "'");
  DemoDataset demos;
  std::map<int, size_t> slot;
  std::string text;
  int line = 0;
  while (std::getline(in, text)) {
    ++line;
    if (text.find_first_not_of(" \t\r") == std::string::npos) continue;
    DemoStep step;
    int id = 0;
    int t = 0;
    try {
      const json j = json::parse(text);
      id = j.at("rollout_id").get<int>();
      t = j.at("t").get<int>();
      const auto zeta = j.at("zeta").get<std::vector<double>>();
      if (zeta.size() != BimanualPose::kDim) {
        throw ParseError("zeta must have 14 entries", line);
      }
      step.zeta = BimanualPose::FromVector(zeta);
      step.subgraph = SubgraphFromJson(j.at("subgraph"));
    } catch (const json::exception& e) {
      throw ParseError(path + ": " + e.what(), line);
    } catch (const ParseError& e) {
      if (e.line() != 0) throw;
      throw ParseError(path + ": " + e.what(), line);
    }
    CheckFinite(step, line);
    auto [it, inserted] = slot.try_emplace(id, demos.rollouts.size());
    if (inserted) demos.rollouts.push_back({id, {}});
    DemoRollout& rollout = demos.rollouts[it->second];
    if (t != static_cast<int>(rollout.steps.size())) {
      throw ParseError("rollout " + std::to_string(id) + " expected t = " +
                           std::to_string(rollout.steps.size()) + ", got " +
                           std::to_string(t),
                       line);
    }
    rollout.steps.push_back(std::move(step));
  }
  if (demos.rollouts.empty()) throw ParseError(path + ": no demonstration steps", line);
  return demos;
}

void SaveDemonstrations(const std::string& path, const DemoDataset& demos) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write demonstrations '" + path + "'");
  for (const DemoRollout& r : demos.rollouts) {
    for (size_t t = 0; t < r.steps.size(); ++t) {
      const json j = {{"rollout_id", r.id},
                      {"t", t},
                      {"zeta", r.steps[t].zeta.ToVector()},
                      {"subgraph", SubgraphToJson(r.steps[t].subgraph)}};
      out << j.dump() << "\n";
    }
  }
  if (!out) throw ConfigError("failed writing demonstrations '" + path + "'");
}

DemoDataset GenerateScriptedDemos(const EnvConfig& config, int n_rollouts,
                                  std::uint64_t seed,
                                  const ScriptedDemoOptions& options) {
  if (n_rollouts < 1) throw ConfigError("demo-gen: need at least one rollout");
  const DoughEnv env(config);
  const GoalSpec& goal = env.goal();
  double goal_height = 0.0;
  for (double h : goal.goal_heights) goal_height = std::max(goal_height, h);
  const double press_z = config.pin_radius + goal_height;
  const double reach = options.reach * config.goal_radius;

  DemoDataset demos;
  for (int i = 0; i < n_rollouts; ++i) {
    Rng rng(Rng::Derive(seed, i));
    auto [state, obs] = env.Reset(Rng::Derive(seed, 1000 + i));
    const ObjectSubgraph first =
        Abstract(obs, DoughColorBounds(), config.board_size).subgraph;
    const double cx = first.nodes[0].x;
    const double cy = first.nodes[0].y;
    const double phase = rng.Uniform(0.0, 2.0 * std::numbers::pi);

    std::vector<PinPose> plan;
    auto pin = [&](double x, double y, double z, double yaw) {
      PinPose p = env.StartPin();
      p.x = x;
      p.y = y;
      p.z = z;
      p.yaw = yaw;
      plan.push_back(p);
    };
    pin(cx, cy, press_z, phase + 0.5 * std::numbers::pi);
    for (int k = 0; k < options.strokes; ++k) {
      const double theta = phase + k * options.turn;
      const double yaw = theta + 0.5 * std::numbers::pi;
      const double dx = std::cos(theta), dy = std::sin(theta);
      pin(cx, cy, press_z, yaw);
      pin(cx + 0.5 * reach * dx, cy + 0.5 * reach * dy, press_z, yaw);
      pin(cx + reach * dx, cy + reach * dy, press_z, yaw);
      pin(cx, cy, options.lift_height, yaw);
    }

    DemoRollout rollout;
    rollout.id = i;
    for (const PinPose& p : plan) {
      DemoStep step;
      step.zeta = EncodePin(p);
      step.subgraph = Abstract(obs, DoughColorBounds(), config.board_size).subgraph;
      const StepResult r = env.Step(state, step.zeta);
      state = r.state;
      obs = r.obs;
      rollout.steps.push_back(std::move(step));
    }
    demos.rollouts.push_back(std::move(rollout));
  }
  return demos;
}

DemoIndex AllDemoSteps(const DemoDataset& demos) {
  DemoIndex index;
  for (size_t r = 0; r < demos.rollouts.size(); ++r) {
    for (size_t t = 0; t < demos.rollouts[r].steps.size(); ++t) {
      index.emplace_back(static_cast<int>(r), static_cast<int>(t));
    }
  }
  return index;
}

DemoBatch MakeDemoBatch(const DemoDataset& demos, const DemoIndex& samples,
                        const ModelConfig& config, const BimanualPose& start) {
  if (samples.empty()) throw ContractError("demo batch: no samples");
  std::vector<GraphInstance> graphs, goals;
  Tensor actions(static_cast<int>(samples.size()), config.action_dim());
  for (size_t i = 0; i < samples.size(); ++i) {
    const auto [r, t] = samples[i];
    const DemoRollout& rollout = demos.rollouts.at(r);
    const DemoStep& step = rollout.steps.at(t);
    const BimanualPose& previous = t == 0 ? start : rollout.steps[t - 1].zeta;
    graphs.push_back(MakeInstance(step.subgraph, previous, config));
    goals.push_back(MakeGoalInstance(rollout.steps.back().subgraph, config));
    const std::vector<double> u = config.actions.Normalize(step.zeta);
    std::copy(u.begin(), u.end(), &actions(static_cast<int>(i), 0));
  }
  return {GraphBatch::Build(graphs), GraphBatch::Build(goals), std::move(actions)};
}

}  // namespace dgform
