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

#include "dgform/net/checkpoint.h"

#include <fstream>

#include "dgform/common/error.h"

namespace dgform {
namespace {

using nlohmann::json;

json TensorToJson(const Tensor& t) {
  return {{"rows", t.rows()}, {"cols", t.cols()}, {"data", t.storage()}};
}

Tensor TensorFromJson(const json& j) {
  Tensor t(j.at("rows").get<int>(), j.at("cols").get<int>(),
           j.at("data").get<std::vector<double>>());
  t.set_requires_grad(true);
  return t;
}

}  // namespace

json ModelConfigToJson(const ModelConfig& c) {
  return {{"hidden_dim", c.hidden_dim},
          {"obj_attr_dim", c.obj_attr_dim},
          {"man_attr_dim", c.man_attr_dim},
          {"num_manipulators", c.num_manipulators},
          {"init_log_std", c.init_log_std},
          {"policy_out_init", c.policy_out_init},
          {"features",
           {{"position_scale", c.features.position_scale},
            {"depth_reference", c.features.depth_reference},
            {"depth_scale", c.features.depth_scale}}},
          {"actions", {{"offset", c.actions.offset}, {"scale", c.actions.scale}}}};
}

ModelConfig ModelConfigFromJson(const json& j) {
  ModelConfig c;
  c.hidden_dim = j.at("hidden_dim").get<int>();
  c.obj_attr_dim = j.at("obj_attr_dim").get<int>();
  c.man_attr_dim = j.at("man_attr_dim").get<int>();
  c.num_manipulators = j.at("num_manipulators").get<int>();
  c.init_log_std = j.at("init_log_std").get<double>();
  c.policy_out_init = j.at("policy_out_init").get<double>();
  const json& f = j.at("features");
  c.features.position_scale = f.at("position_scale").get<double>();
  c.features.depth_reference = f.at("depth_reference").get<double>();
  c.features.depth_scale = f.at("depth_scale").get<double>();
  c.actions.offset = j.at("actions").at("offset").get<std::vector<double>>();
  c.actions.scale = j.at("actions").at("scale").get<std::vector<double>>();
  c.Validate();
  return c;
}

json CheckpointToJson(const Checkpoint& ck) {
  json params = json::object();
  for (const auto& [name, t] : ck.params.Named()) params[name] = TensorToJson(*t);
  json j = {{"version", kCheckpointVersion},
            {"config", ModelConfigToJson(ck.config)},
            {"params", params},
            {"alpha", ck.alpha},
            {"seed", ck.seed},
            {"update", ck.update},
            {"rng_state", ck.rng_state},
            {"hyperparameters", ck.hyperparameters}};
  if (ck.optimizer) {
    const AdamState& s = *ck.optimizer;
    j["optimizer"] = {{"lr", s.options.lr},
                      {"beta1", s.options.beta1},
                      {"beta2", s.options.beta2},
                      {"eps", s.options.eps},
                      {"step", s.step},
                      {"first_moment", s.first_moment},
                      {"second_moment", s.second_moment}};
  }
  return j;
}

Checkpoint CheckpointFromJson(const json& j) {
  const std::string version = j.value("version", std::string("<missing>"));
  if (version != kCheckpointVersion) throw VersionError(version, kCheckpointVersion);
  try {
    Checkpoint ck;
    ck.config = ModelConfigFromJson(j.at("config"));
    ck.params = ModelParams::Zeros(ck.config);
    const json& params = j.at("params");
    for (auto& [name, t] : ck.params.Named()) {
      Tensor loaded = TensorFromJson(params.at(name));
      if (!loaded.SameShape(*t)) {
        throw ParseError("checkpoint tensor '" + name + "' has shape " +
                             loaded.ShapeString() + ", expected " +
                             t->ShapeString(),
                         0);
      }
      *t = std::move(loaded);
    }
    ck.params.hidden_dim = ck.config.hidden_dim;
    ck.alpha = j.at("alpha").get<double>();
    ck.seed = j.at("seed").get<std::uint64_t>();
    ck.update = j.at("update").get<int>();
    ck.rng_state = j.at("rng_state").get<std::string>();
    ck.hyperparameters = j.at("hyperparameters");
    if (j.contains("optimizer")) {
      const json& o = j["optimizer"];
      AdamState s;
      s.options = {o.at("lr").get<double>(), o.at("beta1").get<double>(),
                   o.at("beta2").get<double>(), o.at("eps").get<double>()};
      s.step = o.at("step").get<long>();
      s.first_moment = o.at("first_moment").get<std::vector<std::vector<double>>>();
      s.second_moment = o.at("second_moment").get<std::vector<std::vector<double>>>();
      ck.optimizer = std::move(s);
    }
    return ck;
  } catch (const json::exception& e) {
    throw ParseError(std::string("checkpoint: ") + e.what(), 0);
  } catch (const ShapeError& e) {
    throw ParseError(std::string("checkpoint: ") + e.what(), 0);
  }
}

void SaveCheckpoint(const std::string& path, const Checkpoint& checkpoint) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write checkpoint '" + path + "'");
  out << CheckpointToJson(checkpoint).dump() << "\n";
  if (!out) throw ConfigError("failed writing checkpoint '" + path + "'");
}

Checkpoint LoadCheckpoint(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open checkpoint '" + path + "'");
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ParseError("checkpoint '" + path + "': " + e.what(), 0);
  }
  return CheckpointFromJson(j);
}

}  // namespace dgform
