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

#ifndef DGFORM_NET_CHECKPOINT_H_
#define DGFORM_NET_CHECKPOINT_H_

#include <cstdint>
#include <optional>
#include <string>

#include "dgform/net/model.h"
#include "dgform/tensor/adam.h"
#include "json.hpp"

namespace dgform {

inline constexpr char kCheckpointVersion[] = "dgform-checkpoint/1";

struct Checkpoint {
  ModelConfig config;
  ModelParams params;
  double alpha = 0.0;
  std::uint64_t seed = 0;
  int update = 0;
  std::string rng_state;
  nlohmann::json hyperparameters = nlohmann::json::object();
  std::optional<AdamState> optimizer;
};

nlohmann::json ModelConfigToJson(const ModelConfig& config);
ModelConfig ModelConfigFromJson(const nlohmann::json& j);

nlohmann::json CheckpointToJson(const Checkpoint& checkpoint);
// VersionError on a different format tag, ParseError on malformed content or
// tensors whose shapes disagree with the stored config.
Checkpoint CheckpointFromJson(const nlohmann::json& j);

void SaveCheckpoint(const std::string& path, const Checkpoint& checkpoint);
Checkpoint LoadCheckpoint(const std::string& path);

}  // namespace dgform

#endif  // DGFORM_NET_CHECKPOINT_H_
