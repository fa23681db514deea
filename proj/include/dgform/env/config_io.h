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

#ifndef DGFORM_ENV_CONFIG_IO_H_
#define DGFORM_ENV_CONFIG_IO_H_

#include <string>

#include "dgform/env/dough_env.h"
#include "json.hpp"

namespace dgform {

// Missing keys keep their defaults; unknown keys are rejected so that typos
// surface as ConfigError instead of silently running the default.
EnvConfig EnvConfigFromJson(const nlohmann::json& j);
nlohmann::json EnvConfigToJson(const EnvConfig& config);
EnvConfig LoadEnvConfig(const std::string& path);

}  // namespace dgform

#endif  // DGFORM_ENV_CONFIG_IO_H_
