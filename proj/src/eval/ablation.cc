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

#include "dgform/eval/ablation.h"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "dgform/common/error.h"
#include "dgform/env/config_io.h"

namespace dgform {
namespace {

std::optional<Representation> ParseRepresentation(const std::string& name) {
  for (Representation r : {Representation::kRandom, Representation::kFullState,
                           Representation::kRgbd, Representation::kHomoGraph,
                           Representation::kHeteroGraph}) {
    if (RepresentationName(r) == name) return r;
  }
  return std::nullopt;
}

std::uint64_t EvalEnvSeed(std::uint64_t seed, int episode) {
  return Rng::Derive(seed, 200000 + static_cast<std::uint64_t>(episode));
}

void Accumulate(MetricReport& report, const EpisodeResult& e) {
  report.episode_rewards.push_back(e.total_reward);
  report.episodes.push_back(e.final);
}

void Finish(MetricReport& report) {
  const double n = static_cast<double>(report.episodes.size());
  for (size_t i = 0; i < report.episodes.size(); ++i) {
    report.reward_total += report.episode_rewards[i] / n;
    report.iou += report.episodes[i].iou / n;
    report.sdf += report.episodes[i].sdf / n;
    report.density += report.episodes[i].density / n;
  }
}

std::string Format(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.10g", v);
  return buf;
}

double ParseDouble(const std::string& s, int line) {
  try {
    size_t used = 0;
    const double v = std::stod(s, &used);
    if (used == s.size()) return v;
  } catch (const std::exception&) {
  }
  throw ParseError("ablation csv line " + std::to_string(line) + ": bad number '" + s + "'");
}

}  // namespace

const std::vector<std::string>& AblationVariants() {
  static const std::vector<std::string> names = {
      "random", "ppo-full", "ppo-rgbd", "ppo-homo", "ppo-hetero", "dgform", "dgform-i", "dgform-il"};
  return names;
}

bool IsModelVariant(const std::string& name) {
  return name == "dgform" || name == "dgform-i" || name == "dgform-il";
}

void AblationConfig::Validate() const {
  train.Validate();
  if (variants.empty()) throw ConfigError("ablation needs at least one variant");
  if (seeds.empty()) throw ConfigError("ablation needs at least one seed");
  if (eval_episodes < 1) throw ConfigError("eval_episodes must be >= 1");
  for (const std::string& v : variants) {
    if (std::find(AblationVariants().begin(), AblationVariants().end(), v) ==
        AblationVariants().end()) {
      throw ConfigError("unknown ablation variant '" + v + "'");
    }
  }
}

MetricReport EvaluateModel(const Model& model, const DoughEnv& env, int period, int episodes,
                           std::uint64_t seed) {
  MetricReport report;
  Rng rng(Rng::Derive(seed, 3));
  const ObjectSubgraph goal = GoalSubgraph(env);
  for (int e = 0; e < episodes; ++e) {
    Accumulate(report, RunEpisode(model, env, goal, period, EvalEnvSeed(seed, e), rng, true));
  }
  Finish(report);
  return report;
}

MetricReport EvaluateAgent(Agent& agent, const DoughEnv& env, int period, int episodes,
                           std::uint64_t seed) {
  MetricReport report;
  Rng rng(Rng::Derive(seed, 3));
  // The random agent has no mean action; it stays stochastic.
  const bool deterministic = agent.Learns();
  for (int e = 0; e < episodes; ++e) {
    Accumulate(report,
               RunAgentEpisode(agent, env, period, EvalEnvSeed(seed, e), rng, deterministic));
  }
  Finish(report);
  return report;
}

AblationRow RunVariant(const std::string& variant, std::uint64_t seed,
                       const AblationConfig& config) {
  AblationRow row;
  row.variant = variant;
  row.seed = seed;
  TrainConfig train = config.train;
  train.seed = seed;
  const auto start = std::chrono::steady_clock::now();
  if (IsModelVariant(variant)) {
    train.variant = ParseVariant(variant);
    Trainer trainer(train, config.demos);
    try {
      for (int u = 0; u < train.updates; ++u) trainer.Step();
    } catch (const TrainingError& e) {
      row.diverged = true;
      row.error = e.what();
    }
    row.report = EvaluateModel(trainer.model(), trainer.env(), train.horizon,
                               config.eval_episodes, seed);
  } else {
    const std::optional<Representation> r = ParseRepresentation(variant);
    if (!r) throw ConfigError("unknown ablation variant '" + variant + "'");
    AgentTrainer trainer(*r, train);
    if (trainer.agent().Learns()) {
      try {
        for (int u = 0; u < train.updates; ++u) trainer.Step();
      } catch (const TrainingError& e) {
        row.diverged = true;
        row.error = e.what();
      }
    }
    row.report = EvaluateAgent(trainer.agent(), trainer.env(), train.horizon,
                               config.eval_episodes, seed);
  }
  row.wall_time_s =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return row;
}

std::vector<AblationRow> RunAblation(const AblationConfig& config,
                                     const std::function<void(const AblationRow&)>& on_row) {
  config.Validate();
  std::vector<AblationRow> rows;
  for (const std::string& v : config.variants) {
    for (std::uint64_t seed : config.seeds) {
      rows.push_back(RunVariant(v, seed, config));
      if (on_row) on_row(rows.back());
    }
  }
  SortRows(rows);
  return rows;
}

AblationRow EvaluateCheckpoint(const Checkpoint& checkpoint, int episodes) {
  const TrainConfig train = TrainConfigFromJson(checkpoint.hyperparameters);
  if (!(train.MakeModelConfig() == checkpoint.config)) {
    throw ConfigError("checkpoint model config disagrees with its hyperparameters");
  }
  AblationRow row;
  row.variant = VariantName(train.variant);
  row.seed = checkpoint.seed;
  const auto start = std::chrono::steady_clock::now();
  const Model model(checkpoint.config, checkpoint.params);
  const DoughEnv env(train.env);
  row.report = EvaluateModel(model, env, train.horizon, episodes, checkpoint.seed);
  row.wall_time_s =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return row;
}

void SortRows(std::vector<AblationRow>& rows) {
  std::stable_sort(rows.begin(), rows.end(), [](const AblationRow& a, const AblationRow& b) {
    return a.variant != b.variant ? a.variant < b.variant : a.seed < b.seed;
  });
}

std::string AblationCsvHeader() { return "variant,seed,reward,iou,sdf,density,wall_time_s"; }

std::string AblationCsvRow(const AblationRow& row) {
  return row.variant + "," + std::to_string(row.seed) + "," + Format(row.report.reward_total) +
         "," + Format(row.report.iou) + "," + Format(row.report.sdf) + "," +
         Format(row.report.density) + "," + Format(row.wall_time_s);
}

void WriteAblationCsv(const std::string& path, const std::vector<AblationRow>& rows) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path);
  out << AblationCsvHeader() << "\n";
  for (const AblationRow& row : rows) out << AblationCsvRow(row) << "\n";
  if (!out) throw Error("write failed: " + path);
}

std::vector<AblationRow> ReadAblationCsv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot read " + path);
  std::string line;
  if (!std::getline(in, line) || line != AblationCsvHeader()) {
    throw ParseError(path + " line 1: expected header '" + AblationCsvHeader() + "'");
  }
  std::vector<AblationRow> rows;
  int number = 1;
  while (std::getline(in, line)) {
    ++number;
    if (line.empty()) continue;
    std::vector<std::string> cells;
    std::stringstream ss(line);
    for (std::string cell; std::getline(ss, cell, ',');) cells.push_back(cell);
    if (cells.size() != 7) {
      throw ParseError(path + " line " + std::to_string(number) + ": expected 7 columns, got " +
                       std::to_string(cells.size()));
    }
    AblationRow row;
    row.variant = cells[0];
    if (cells[1].empty() || cells[1].find_first_not_of("0123456789") != std::string::npos) {
      throw ParseError(path + " line " + std::to_string(number) + ": bad seed '" + cells[1] + "'");
    }
    row.seed = std::stoull(cells[1]);
    row.report.reward_total = ParseDouble(cells[2], number);
    row.report.iou = ParseDouble(cells[3], number);
    row.report.sdf = ParseDouble(cells[4], number);
    row.report.density = ParseDouble(cells[5], number);
    row.wall_time_s = ParseDouble(cells[6], number);
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace dgform
