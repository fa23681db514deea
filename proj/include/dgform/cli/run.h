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

#ifndef DGFORM_CLI_RUN_H_
#define DGFORM_CLI_RUN_H_

#include <cstdint>
#include <exception>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "dgform/env/types.h"
#include "dgform/planner/birp.h"
#include "dgform/trainer/train.h"
#include "json.hpp"

namespace dgform {

// Everything a command may read from its config file:
// {"train": {...}, "planner": {...}, "seed": n, "output_dir": "..."}.
struct RunConfig {
  TrainConfig train;
  PlannerConfig planner;
  std::optional<std::uint64_t> seed;  // overrides both sections when set
  std::string output_dir;

  // Pushes `seed` into the train and planner sections.
  void ApplySeed(std::uint64_t s);
};

RunConfig RunConfigFromJson(const nlohmann::json& j);
nlohmann::json RunConfigToJson(const RunConfig& config);
// ConfigError naming the path when it is missing or malformed.
RunConfig LoadRunConfig(const std::string& path);

// --out wins; otherwise <root>/<command>-<UTC timestamp>, root from
// DGFORM_OUT, then the config's output_dir, then "runs". A numeric suffix
// keeps the directory fresh.
std::filesystem::path ResolveOutputDir(const std::string& explicit_out,
                                       const std::string& config_root,
                                       const std::string& command);

// Artifact bookkeeping for one command. The manifest lists the command, its
// effective configuration and artifacts and is deterministic; wall-clock data
// goes to metadata.json only.
class RunDirectory {
 public:
  RunDirectory(std::filesystem::path dir, std::string command);

  const std::filesystem::path& path() const { return dir_; }
  std::filesystem::path File(const std::string& relative);  // creates parents
  void Record(const std::string& relative);
  void WriteManifest(const nlohmann::json& config) const;
  void WriteMetadata(double wall_time_s) const;

 private:
  std::filesystem::path dir_;
  std::string command_;
  std::vector<std::string> artifacts_;
  std::string started_;
};

void WriteJsonFile(const std::filesystem::path& path, const nlohmann::json& j);
nlohmann::json ReadJsonFile(const std::string& path);

// Binary PPM (P6) of the RGB channels.
void WritePpm(const std::filesystem::path& path, const RgbdObs& obs);

// 0 success, 1 usage or configuration, 2 runtime or numerical failure.
int ExitCodeFor(const std::exception& e);

}  // namespace dgform

#endif  // DGFORM_CLI_RUN_H_
