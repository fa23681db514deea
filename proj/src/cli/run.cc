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

#include "dgform/cli/run.h"

#include <cstdlib>
#include <ctime>
#include <fstream>
#include <set>

#include "dgform/common/error.h"

namespace dgform {
namespace {

using nlohmann::json;

std::string UtcNow(const char* format) {
  const std::time_t now = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[64];
  std::strftime(buf, sizeof(buf), format, &tm);
  return buf;
}

}  // namespace

void RunConfig::ApplySeed(std::uint64_t s) {
  seed = s;
  train.seed = s;
  planner.seed = s;
}

RunConfig RunConfigFromJson(const json& j) {
  if (!j.is_object()) throw ConfigError("run config must be a JSON object");
  static const std::set<std::string> kKeys{"train", "planner", "seed", "output_dir"};
  for (const auto& [key, value] : j.items()) {
    if (!kKeys.count(key)) throw ConfigError("unknown run config key '" + key + "'");
  }
  RunConfig c;
  if (j.contains("train")) c.train = TrainConfigFromJson(j.at("train"));
  if (j.contains("planner")) c.planner = PlannerConfigFromJson(j.at("planner"));
  try {
    if (j.contains("output_dir")) c.output_dir = j.at("output_dir").get<std::string>();
    if (j.contains("seed")) {
      const json& s = j.at("seed");
      if (!s.is_number_unsigned()) throw ConfigError("seed must be a non-negative integer");
      c.ApplySeed(s.get<std::uint64_t>());
    }
  } catch (const json::exception& e) {
    throw ConfigError(std::string("run config: ") + e.what());
  }
  return c;
}

json RunConfigToJson(const RunConfig& c) {
  json j = {{"train", TrainConfigToJson(c.train)},
            {"planner", PlannerConfigToJson(c.planner)},
            {"output_dir", c.output_dir}};
  if (c.seed) j["seed"] = *c.seed;
  return j;
}

RunConfig LoadRunConfig(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  json j;
  try {
    j = json::parse(in);
  } catch (const json::exception& e) {
    throw ConfigError("config file '" + path + "': " + e.what());
  }
  try {
    return RunConfigFromJson(j);
  } catch (const ConfigError& e) {
    throw ConfigError("config file '" + path + "': " + e.what());
  }
}

std::filesystem::path ResolveOutputDir(const std::string& explicit_out,
                                       const std::string& config_root,
                                       const std::string& command) {
  if (!explicit_out.empty()) return explicit_out;
  std::filesystem::path root = "runs";
  if (const char* env = std::getenv("DGFORM_OUT"); env != nullptr && *env != '\0') {
    root = env;
  } else if (!config_root.empty()) {
    root = config_root;
  }
  const std::string stem = command + "-" + UtcNow("%Y%m%d-%H%M%S");
  std::filesystem::path dir = root / stem;
  for (int n = 1; std::filesystem::exists(dir); ++n) {
    dir = root / (stem + "-" + std::to_string(n));
  }
  return dir;
}

RunDirectory::RunDirectory(std::filesystem::path dir, std::string command)
    : dir_(std::move(dir)), command_(std::move(command)), started_(UtcNow("%Y-%m-%dT%H:%M:%SZ")) {
  std::error_code ec;
  std::filesystem::create_directories(dir_, ec);
  if (ec) throw ConfigError("cannot create output directory '" + dir_.string() + "': " + ec.message());
}

std::filesystem::path RunDirectory::File(const std::string& relative) {
  const std::filesystem::path p = dir_ / relative;
  std::filesystem::create_directories(p.parent_path());
  Record(relative);
  return p;
}

void RunDirectory::Record(const std::string& relative) {
  for (const std::string& a : artifacts_) {
    if (a == relative) return;
  }
  artifacts_.push_back(relative);
}

void RunDirectory::WriteManifest(const json& config) const {
  WriteJsonFile(dir_ / "manifest.json",
                {{"command", command_}, {"config", config}, {"artifacts", artifacts_}});
}

void RunDirectory::WriteMetadata(double wall_time_s) const {
  WriteJsonFile(dir_ / "metadata.json", {{"started_utc", started_},
                                         {"finished_utc", UtcNow("%Y-%m-%dT%H:%M:%SZ")},
                                         {"wall_time_s", wall_time_s}});
}

void WriteJsonFile(const std::filesystem::path& path, const json& j) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path.string());
  out << j.dump(2) << "\n";
  if (!out) throw Error("write failed: " + path.string());
}

json ReadJsonFile(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open '" + path + "'");
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw ParseError("'" + path + "': " + e.what());
  }
}

void WritePpm(const std::filesystem::path& path, const RgbdObs& obs) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  out << "P6\n" << obs.width << " " << obs.height << "\n255\n";
  out.write(reinterpret_cast<const char*>(obs.rgb.data()),
            static_cast<std::streamsize>(obs.rgb.size()));
  if (!out) throw Error("write failed: " + path.string());
}

int ExitCodeFor(const std::exception& e) {
  if (dynamic_cast<const ConfigError*>(&e) != nullptr ||
      dynamic_cast<const ParseError*>(&e) != nullptr ||
      dynamic_cast<const VersionError*>(&e) != nullptr) {
    return 1;
  }
  return 2;
}

}  // namespace dgform
