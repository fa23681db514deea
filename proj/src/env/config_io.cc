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

#include "dgform/env/config_io.h"

#include <fstream>
#include <set>

#include "dgform/common/error.h"

namespace dgform {
namespace {

template <typename T>
void Read(const nlohmann::json& j, const char* key, T& field) {
  if (!j.contains(key)) return;
  try {
    field = j.at(key).get<T>();
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("env config field '") + key + "': " + e.what());
  }
}

}  // namespace

EnvConfig EnvConfigFromJson(const nlohmann::json& j) {
  if (!j.is_object()) throw ConfigError("env config must be a JSON object");
  static const std::set<std::string> kKeys = {
      "grid_size",       "board_size",     "volume",
      "mound_radius",    "mound_center_jitter", "mound_aspect_jitter",
      "pin_radius",      "pin_half_length", "pin_start_z",
      "pin_max_z",       "horizon",        "camera_resolution",
      "camera_height",   "reward_weights", "occlusion",
      "mask_threshold",  "goal_radius"};
  for (const auto& [key, value] : j.items()) {
    if (!kKeys.count(key)) throw ConfigError("unknown env config key '" + key + "'");
  }
  EnvConfig c;
  Read(j, "grid_size", c.grid_size);
  Read(j, "board_size", c.board_size);
  Read(j, "volume", c.volume);
  Read(j, "mound_radius", c.mound_radius);
  Read(j, "mound_center_jitter", c.mound_center_jitter);
  Read(j, "mound_aspect_jitter", c.mound_aspect_jitter);
  Read(j, "pin_radius", c.pin_radius);
  Read(j, "pin_half_length", c.pin_half_length);
  Read(j, "pin_start_z", c.pin_start_z);
  Read(j, "pin_max_z", c.pin_max_z);
  Read(j, "horizon", c.horizon);
  Read(j, "camera_resolution", c.camera_resolution);
  Read(j, "camera_height", c.camera_height);
  Read(j, "occlusion", c.occlusion);
  Read(j, "mask_threshold", c.mask_threshold);
  Read(j, "goal_radius", c.goal_radius);
  if (j.contains("reward_weights")) {
    const auto& w = j.at("reward_weights");
    if (w.is_array()) {
      if (w.size() != 3) throw ConfigError("reward_weights needs 3 entries");
      c.reward = {w[0].get<double>(), w[1].get<double>(), w[2].get<double>()};
    } else {
      Read(w, "sdf", c.reward.sdf);
      Read(w, "iou", c.reward.iou);
      Read(w, "density", c.reward.density);
    }
  }
  c.Validate();
  return c;
}

nlohmann::json EnvConfigToJson(const EnvConfig& c) {
  return {{"grid_size", c.grid_size},
          {"board_size", c.board_size},
          {"volume", c.volume},
          {"mound_radius", c.mound_radius},
          {"mound_center_jitter", c.mound_center_jitter},
          {"mound_aspect_jitter", c.mound_aspect_jitter},
          {"pin_radius", c.pin_radius},
          {"pin_half_length", c.pin_half_length},
          {"pin_start_z", c.pin_start_z},
          {"pin_max_z", c.pin_max_z},
          {"horizon", c.horizon},
          {"camera_resolution", c.camera_resolution},
          {"camera_height", c.camera_height},
          {"reward_weights",
           {{"sdf", c.reward.sdf}, {"iou", c.reward.iou},
            {"density", c.reward.density}}},
          {"occlusion", c.occlusion},
          {"mask_threshold", c.mask_threshold},
          {"goal_radius", c.goal_radius}};
}

EnvConfig LoadEnvConfig(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open env config '" + path + "'");
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError("env config '" + path + "': " + e.what());
  }
  return EnvConfigFromJson(j);
}

}  // namespace dgform
