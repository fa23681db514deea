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

#ifndef DGFORM_EVAL_ABLATION_H_
#define DGFORM_EVAL_ABLATION_H_

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "dgform/eval/agents.h"
#include "dgform/eval/metrics.h"
#include "dgform/net/checkpoint.h"
#include "dgform/trainer/demos.h"
#include "dgform/trainer/train.h"

namespace dgform {

// random, ppo-full, ppo-rgbd, ppo-homo, ppo-hetero, dgform, dgform-i,
// dgform-il.
const std::vector<std::string>& AblationVariants();
bool IsModelVariant(const std::string& name);

struct AblationConfig {
  TrainConfig train;  // seed and variant are overridden per run
  std::vector<std::string> variants = AblationVariants();
  std::vector<std::uint64_t> seeds = {0, 1, 2, 3, 4};
  int eval_episodes = 3;
  std::optional<DemoDataset> demos;

  void Validate() const;
};

struct AblationRow {
  std::string variant;
  std::uint64_t seed = 0;
  MetricReport report;
  double wall_time_s = 0.0;
  bool diverged = false;
  std::string error;  // divergence message
};

// Deterministic evaluation on episodes reset from Derive(seed, 200000 + e).
MetricReport EvaluateModel(const Model& model, const DoughEnv& env, int period,
                           int episodes, std::uint64_t seed);
MetricReport EvaluateAgent(Agent& agent, const DoughEnv& env, int period, int episodes,
                           std::uint64_t seed);

// Trains one variant for config.train.updates and evaluates the result. A
// divergence stops training early; the row then holds the last finite
// parameters' evaluation with diverged set.
AblationRow RunVariant(const std::string& variant, std::uint64_t seed,
                       const AblationConfig& config);

// Rows sorted by variant name, then seed.
std::vector<AblationRow> RunAblation(
    const AblationConfig& config,
    const std::function<void(const AblationRow&)>& on_row = {});

// Single row for a saved DGform checkpoint; the variant and env come from the
// stored hyperparameters.
AblationRow EvaluateCheckpoint(const Checkpoint& checkpoint, int episodes);

void SortRows(std::vector<AblationRow>& rows);

// Columns: variant, seed, reward, iou, sdf, density, wall_time_s.
std::string AblationCsvHeader();
std::string AblationCsvRow(const AblationRow& row);
void WriteAblationCsv(const std::string& path, const std::vector<AblationRow>& rows);
// ParseError naming the line on a malformed row.
std::vector<AblationRow> ReadAblationCsv(const std::string& path);

}  // namespace dgform

#endif  // DGFORM_EVAL_ABLATION_H_
