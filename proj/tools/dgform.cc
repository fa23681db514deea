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

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>

#include "CLI11.hpp"
#include "dgform/cli/plot.h"
#include "dgform/cli/run.h"
#include "dgform/common/error.h"
#include "dgform/eval/ablation.h"
#include "dgform/net/checkpoint.h"
#include "dgform/planner/birp.h"
#include "dgform/trainer/demos.h"
#include "dgform/trainer/train.h"

namespace dgform {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

struct Common {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::string out;
};

void AddCommon(CLI::App* cmd, Common& c) {
  cmd->add_option("-c,--config", c.config_path, "JSON run config");
  cmd->add_option("--seed", c.seed, "overrides the config seed");
  cmd->add_option("--out", c.out, "output directory (default: timestamped under DGFORM_OUT)");
}

RunConfig Resolve(const Common& c) {
  RunConfig rc = c.config_path.empty() ? RunConfig{} : LoadRunConfig(c.config_path);
  if (c.seed) rc.ApplySeed(*c.seed);
  return rc;
}

std::string Fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.10g", v);
  return buf;
}

std::ofstream OpenText(const fs::path& path) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path.string());
  return out;
}

void WriteText(const fs::path& path, const std::string& text) { OpenText(path) << text; }

std::string CheckpointName(int update) {
  char buf[48];
  std::snprintf(buf, sizeof(buf), "checkpoints/update_%05d.json", update);
  return buf;
}

double Seconds(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

// --- train -------------------------------------------------------------

struct TrainArgs {
  Common common;
  std::optional<int> updates;
  std::string demos;
  std::string variant;
  int checkpoint_every = 50;
};

int RunTrain(const TrainArgs& a) {
  const auto start = std::chrono::steady_clock::now();
  RunConfig rc = Resolve(a.common);
  if (a.updates) rc.train.updates = *a.updates;
  if (!a.variant.empty()) rc.train.variant = ParseVariant(a.variant);
  if (a.checkpoint_every < 1) throw ConfigError("--checkpoint-every must be >= 1");
  rc.train.Validate();
  std::optional<DemoDataset> demos;
  if (!a.demos.empty()) demos = LoadDemonstrations(a.demos);

  RunDirectory run(ResolveOutputDir(a.common.out, rc.output_dir, "train"), "train");
  json config = RunConfigToJson(rc);
  config["demos"] = a.demos;
  config["checkpoint_every"] = a.checkpoint_every;

  Trainer trainer(rc.train, std::move(demos));
  std::string last_checkpoint = CheckpointName(0);
  SaveCheckpoint(run.File(last_checkpoint).string(), trainer.MakeCheckpoint());
  std::ofstream csv = OpenText(run.File("metrics.csv"));
  csv << MetricsCsvHeader() << "\n";

  json summary = {{"updates_requested", rc.train.updates}, {"variant", VariantName(rc.train.variant)}};
  std::optional<UpdateMetrics> last;
  int status = 0;
  try {
    for (int u = 0; u < rc.train.updates; ++u) {
      last = trainer.Step();
      csv << MetricsCsvRow(*last) << "\n" << std::flush;
      const int done = u + 1;
      if (done % a.checkpoint_every == 0 || done == rc.train.updates) {
        last_checkpoint = CheckpointName(done);
        SaveCheckpoint(run.File(last_checkpoint).string(), trainer.MakeCheckpoint());
      }
    }
  } catch (const TrainingError& e) {
    // The trainer has rolled back; keep its last finite state.
    last_checkpoint = CheckpointName(trainer.update());
    SaveCheckpoint(run.File(last_checkpoint).string(), trainer.MakeCheckpoint());
    summary["error"] = e.what();
    std::cerr << "dgform train: diverged: " << e.what() << "\n";
    status = 2;
  }
  summary["updates_completed"] = trainer.update();
  summary["diverged"] = status != 0;
  summary["alpha"] = trainer.alpha();
  summary["last_checkpoint"] = last_checkpoint;
  if (last) {
    summary["final"] = {{"reward_mean", last->reward_mean}, {"iou", last->iou},
                        {"sdf", last->sdf}, {"density", last->density}};
  }
  WriteJsonFile(run.File("summary.json"), summary);
  run.WriteManifest(config);
  run.WriteMetadata(Seconds(start));
  std::cout << run.path().string() << "\n";
  return status;
}

// --- rollout -----------------------------------------------------------

struct RolloutArgs {
  Common common;
  std::string checkpoint;
  std::string goal;
  int horizon = 50;
  bool deterministic = false;
  int episodes = 1;
};

const char* const kPoseColumns[] = {"x", "y", "z", "qw", "qx", "qy", "qz"};

GoalSpec LoadGoal(const std::string& path, const EnvConfig& env) {
  const json j = ReadJsonFile(path);
  if (!j.is_object()) throw ConfigError("goal file must hold a JSON object");
  GoalParams p;
  p.radius = env.goal_radius;
  p.volume = env.volume;
  for (const auto& [key, value] : j.items()) {
    if (!value.is_number()) throw ConfigError("goal field '" + key + "' must be a number");
    if (key == "radius") {
      p.radius = value.get<double>();
    } else if (key == "center_x") {
      p.center_x = value.get<double>();
    } else if (key == "center_y") {
      p.center_y = value.get<double>();
    } else {
      throw ConfigError("unknown goal key '" + key + "' (radius, center_x, center_y)");
    }
  }
  return MakeGoal(GoalKind::kFlatDisk, p, env);
}

int RunRollout(const RolloutArgs& a) {
  const auto start = std::chrono::steady_clock::now();
  if (a.horizon < 1) throw ConfigError("--horizon must be >= 1");
  if (a.episodes < 1) throw ConfigError("--episodes must be >= 1");
  const Checkpoint ck = LoadCheckpoint(a.checkpoint);
  const TrainConfig train = TrainConfigFromJson(ck.hyperparameters);
  const std::uint64_t seed = a.common.seed.value_or(ck.seed);
  const DoughEnv env = a.goal.empty() ? DoughEnv(train.env)
                                      : DoughEnv(train.env, LoadGoal(a.goal, train.env));
  const Model model(ck.config, ck.params);
  const ObjectSubgraph goal = GoalSubgraph(env);

  RunDirectory run(ResolveOutputDir(a.common.out, "", "rollout"), "rollout");
  std::ofstream traj = OpenText(run.File("trajectory.csv"));
  traj << "episode,period,step";
  for (const char* arm : {"left", "right"}) {
    for (const char* c : kPoseColumns) traj << "," << arm << "_" << c;
  }
  traj << ",reward\n";
  std::ofstream periods = OpenText(run.File("periods.csv"));
  periods << "episode,period,steps,reward,iou,sdf,density\n";

  Rng rng(Rng::Derive(seed, 3));
  json episodes = json::array();
  for (int e = 0; e < a.episodes; ++e) {
    const std::uint64_t env_seed = Rng::Derive(seed, 200000 + static_cast<std::uint64_t>(e));
    const EpisodeResult result = RunEpisode(model, env, goal, a.horizon, env_seed, rng, a.deterministic);
    // Replaying the executed poses reproduces every period's end state.
    DoughState state = env.Reset(env_seed).first;
    const std::string prefix = "snapshots/episode" + std::to_string(e) + "_";
    WritePpm(run.File(prefix + "initial.ppm"), env.Render(state));
    int step = 0;
    for (size_t p = 0; p < result.periods.size(); ++p) {
      const PeriodRecord& rec = result.periods[p];
      state = env.ResetPin(std::move(state));
      double reward = 0.0;
      for (size_t i = 0; i < rec.poses.size(); ++i, ++step) {
        traj << e << "," << p << "," << step;
        for (double v : rec.poses[i].ToVector()) traj << "," << Fmt(v);
        traj << "," << Fmt(rec.rewards[i]) << "\n";
        reward += rec.rewards[i];
        state = env.Step(state, rec.poses[i]).state;
      }
      periods << e << "," << p << "," << rec.poses.size() << "," << Fmt(reward) << ","
              << Fmt(rec.metrics.iou) << "," << Fmt(rec.metrics.sdf) << ","
              << Fmt(rec.metrics.density) << "\n";
      char name[32];
      std::snprintf(name, sizeof(name), "period%03zu.ppm", p);
      WritePpm(run.File(prefix + name), env.Render(state));
    }
    episodes.push_back({{"env_seed", env_seed},
                        {"total_reward", result.total_reward},
                        {"initial", {{"iou", result.initial.iou}, {"sdf", result.initial.sdf},
                                     {"density", result.initial.density}}},
                        {"final", {{"iou", result.final.iou}, {"sdf", result.final.sdf},
                                   {"density", result.final.density}}}});
  }
  WriteJsonFile(run.File("summary.json"), {{"episodes", episodes}});
  run.WriteManifest({{"checkpoint", a.checkpoint},
                     {"goal", a.goal},
                     {"horizon", a.horizon},
                     {"deterministic", a.deterministic},
                     {"episodes", a.episodes},
                     {"seed", seed}});
  run.WriteMetadata(Seconds(start));
  std::cout << run.path().string() << "\n";
  return 0;
}

// --- plan --------------------------------------------------------------

struct PlanArgs {
  Common common;
  std::string waypoints;
  std::string demos;
  std::optional<int> points;
};

int RunPlan(const PlanArgs& a) {
  const auto start = std::chrono::steady_clock::now();
  RunConfig rc = Resolve(a.common);
  if (a.points) rc.planner.points = *a.points;
  rc.planner.Validate();
  const std::vector<BimanualPose> waypoints = LoadWaypoints(a.waypoints);
  const DemoDataset demos = LoadDemonstrations(a.demos);

  RunDirectory run(ResolveOutputDir(a.common.out, rc.output_dir, "plan"), "plan");
  const PlanResult plan = PlanBimanual(waypoints, demos, rc.planner);
  WriteTrajectoryCsv(run.File("trajectory.csv").string(), plan.trajectory);
  WriteJsonFile(run.File("trajectory.json"), TrajectoryHeader(plan.trajectory, rc.planner.order));
  const SmoothnessReport& s = plan.smoothness;
  WriteJsonFile(run.File("smoothness.json"),
                {{"points", plan.trajectory.size()},
                 {"waypoints", waypoints.size()},
                 {"max_acceleration", s.max_acceleration},
                 {"acceleration_limit", rc.planner.max_acceleration},
                 {"within_limit", s.within_limit},
                 {"max_waypoint_error", s.max_waypoint_error},
                 {"relative_pose_error", RelativePoseError(plan.trajectory, plan.coordination)}});
  run.WriteManifest({{"planner", PlannerConfigToJson(rc.planner)},
                     {"waypoints", a.waypoints},
                     {"demos", a.demos}});
  run.WriteMetadata(Seconds(start));
  if (!s.within_limit) {
    std::cerr << "dgform plan: acceleration " << s.max_acceleration << " exceeds limit "
              << rc.planner.max_acceleration << "\n";
  }
  std::cout << run.path().string() << "\n";
  return 0;
}

// --- eval --------------------------------------------------------------

struct EvalArgs {
  Common common;
  std::vector<std::string> inputs;
  bool ablation = false;
  std::vector<std::string> variants;
  std::vector<std::uint64_t> seeds;
  std::optional<int> updates;
  int episodes = 3;
};

std::string FirstLine(const fs::path& path) {
  std::ifstream in(path);
  std::string line;
  std::getline(in, line);
  return line;
}

struct EvalInputs {
  std::vector<AblationRow> rows;
  std::vector<Series> curves;
};

Series LearningCurve(const fs::path& path) {
  std::ifstream in(path);
  std::string line;
  std::getline(in, line);
  Series s;
  s.label = path.parent_path().filename().string();
  int number = 1;
  while (std::getline(in, line)) {
    ++number;
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string update, reward;
    std::getline(ss, update, ',');
    std::getline(ss, reward, ',');
    try {
      s.x.push_back(std::stod(update));
      s.y.push_back(std::stod(reward));
    } catch (const std::exception&) {
      throw ParseError(path.string() + " line " + std::to_string(number) + ": bad metrics row");
    }
  }
  return s;
}

void AddFile(const fs::path& path, int episodes, EvalInputs& in, bool explicit_file) {
  if (path.extension() == ".csv") {
    const std::string header = FirstLine(path);
    if (header == AblationCsvHeader()) {
      for (AblationRow& r : ReadAblationCsv(path.string())) in.rows.push_back(std::move(r));
    } else if (header == MetricsCsvHeader()) {
      in.curves.push_back(LearningCurve(path));
    } else if (explicit_file) {
      throw ConfigError("'" + path.string() + "' is neither a report nor a metrics CSV");
    }
  } else if (path.extension() == ".json" && explicit_file) {
    in.rows.push_back(EvaluateCheckpoint(LoadCheckpoint(path.string()), episodes));
  } else if (explicit_file) {
    throw ConfigError("unsupported eval input '" + path.string() + "'");
  }
}

// Drops exact duplicates; two different rows for one (variant, seed) are an
// error.
std::vector<AblationRow> Merge(std::vector<AblationRow> rows) {
  SortRows(rows);
  std::vector<AblationRow> out;
  for (AblationRow& r : rows) {
    if (!out.empty() && out.back().variant == r.variant && out.back().seed == r.seed) {
      if (AblationCsvRow(out.back()) != AblationCsvRow(r)) {
        throw ConfigError("conflicting rows for " + r.variant + " seed " + std::to_string(r.seed));
      }
      continue;
    }
    out.push_back(std::move(r));
  }
  return out;
}

std::string JobFile(const AblationRow& row) {
  return "reports/" + row.variant + "-seed" + std::to_string(row.seed) + ".csv";
}

int RunEval(const EvalArgs& a) {
  const auto start = std::chrono::steady_clock::now();
  if (a.inputs.empty() && !a.ablation) {
    throw ConfigError("eval needs report files, directories, checkpoints or --ablation");
  }
  if (a.episodes < 1) throw ConfigError("--episodes must be >= 1");
  RunConfig rc = Resolve(a.common);
  EvalInputs in;
  for (const std::string& input : a.inputs) {
    const fs::path p = input;
    if (fs::is_directory(p)) {
      std::vector<fs::path> files;
      for (const auto& entry : fs::recursive_directory_iterator(p)) {
        if (entry.is_regular_file()) files.push_back(entry.path());
      }
      std::sort(files.begin(), files.end());
      for (const fs::path& f : files) AddFile(f, a.episodes, in, false);
    } else if (fs::exists(p)) {
      AddFile(p, a.episodes, in, true);
    } else {
      throw ConfigError("eval input '" + input + "' does not exist");
    }
  }

  RunDirectory run(ResolveOutputDir(a.common.out, rc.output_dir, "eval"), "eval");
  json config = {{"inputs", a.inputs}, {"episodes", a.episodes}};
  if (a.ablation) {
    AblationConfig ac;
    ac.train = rc.train;
    if (a.updates) ac.train.updates = *a.updates;
    if (!a.variants.empty()) ac.variants = a.variants;
    if (!a.seeds.empty()) ac.seeds = a.seeds;
    ac.eval_episodes = a.episodes;
    ac.Validate();
    config["ablation"] = {{"train", TrainConfigToJson(ac.train)},
                          {"variants", ac.variants},
                          {"seeds", ac.seeds}};
    const std::vector<AblationRow> rows = RunAblation(ac, [&](const AblationRow& row) {
      WriteAblationCsv(run.File(JobFile(row)).string(), {row});
      if (row.diverged) std::cerr << "dgform eval: " << row.variant << " seed " << row.seed
                                  << " diverged: " << row.error << "\n";
    });
    in.rows.insert(in.rows.end(), rows.begin(), rows.end());
  }
  if (in.rows.empty() && in.curves.empty()) throw ConfigError("eval inputs hold no report rows");

  const std::vector<AblationRow> rows = Merge(std::move(in.rows));
  WriteAblationCsv(run.File("report.csv").string(), rows);

  std::map<std::string, std::vector<const AblationRow*>> by_variant;
  for (const AblationRow& r : rows) by_variant[r.variant].push_back(&r);
  json summary = json::object();
  const std::pair<const char*, double MetricReport::*> metrics[] = {
      {"reward", &MetricReport::reward_total},
      {"iou", &MetricReport::iou},
      {"sdf", &MetricReport::sdf},
      {"density", &MetricReport::density}};
  if (!rows.empty()) {
    for (const auto& [name, field] : metrics) {
      std::vector<Bar> bars;
      for (const auto& [variant, group] : by_variant) {
        double mean = 0.0, sq = 0.0;
        for (const AblationRow* r : group) mean += r->report.*field / group.size();
        for (const AblationRow* r : group) sq += std::pow(r->report.*field - mean, 2) / group.size();
        bars.push_back({variant, mean, std::sqrt(sq)});
        summary[variant][name] = {{"mean", mean}, {"std", std::sqrt(sq)}, {"runs", group.size()}};
      }
      WriteText(run.File(std::string(name) + ".svg"), BarChartSvg(name, bars));
    }
  }
  if (!in.curves.empty()) {
    WriteText(run.File("learning_curve.svg"),
              LineChartSvg("reward per update", "update", in.curves));
  }
  WriteJsonFile(run.File("summary.json"), summary);
  run.WriteManifest(config);
  run.WriteMetadata(Seconds(start));
  std::cout << run.path().string() << "\n";
  return 0;
}

// --- demo-gen ----------------------------------------------------------

struct DemoArgs {
  Common common;
  int count = 10;
  int waypoints = 0;
};

int RunDemoGen(const DemoArgs& a) {
  const auto start = std::chrono::steady_clock::now();
  const RunConfig rc = Resolve(a.common);
  rc.train.env.Validate();
  if (a.count < 1) throw ConfigError("--count must be >= 1");
  if (a.waypoints == 1 || a.waypoints < 0) throw ConfigError("--waypoints must be 0 or >= 2");
  RunDirectory run(ResolveOutputDir(a.common.out, rc.output_dir, "demo-gen"), "demo-gen");
  const DemoDataset demos =
      GenerateScriptedDemos(rc.train.env, a.count, Rng::Derive(rc.train.seed, 2));
  SaveDemonstrations(run.File("demos.jsonl").string(), demos);
  if (a.waypoints > 0) {
    // Evenly spaced poses of the first demonstration.
    const auto& steps = demos.rollouts.front().steps;
    std::ofstream out = OpenText(run.File("waypoints.txt"));
    out << "# left x y z qw qx qy qz, right x y z qw qx qy qz\n";
    for (int i = 0; i < a.waypoints; ++i) {
      const size_t k = i * (steps.size() - 1) / (a.waypoints - 1);
      const std::vector<double> v = steps[k].zeta.ToVector();
      for (size_t j = 0; j < v.size(); ++j) out << (j ? " " : "") << Fmt(v[j]);
      out << "\n";
    }
  }
  run.WriteManifest({{"env", TrainConfigToJson(rc.train)["env"]},
                     {"count", a.count},
                     {"seed", rc.train.seed},
                     {"waypoints", a.waypoints}});
  run.WriteMetadata(Seconds(start));
  std::cout << run.path().string() << "\n";
  return 0;
}

}  // namespace
}  // namespace dgform

int main(int argc, char** argv) {
  using namespace dgform;
  CLI::App app{"Deformable-object manipulation: train, rollout, plan, eval, demo-gen"};
  app.require_subcommand(1);

  TrainArgs train;
  CLI::App* train_cmd = app.add_subcommand("train", "train a policy");
  AddCommon(train_cmd, train.common);
  train_cmd->add_option("--updates", train.updates, "number of updates");
  train_cmd->add_option("--demos", train.demos, "demonstration JSONL");
  train_cmd->add_option("--variant", train.variant, "dgform, dgform-i or dgform-il");
  train_cmd->add_option("--checkpoint-every", train.checkpoint_every, "updates between checkpoints");

  RolloutArgs rollout;
  CLI::App* rollout_cmd = app.add_subcommand("rollout", "execute a checkpoint in the env");
  rollout_cmd->add_option("checkpoint", rollout.checkpoint, "checkpoint JSON")->required();
  rollout_cmd->add_option("--seed", rollout.common.seed, "episode seed (default: checkpoint seed)");
  rollout_cmd->add_option("--out", rollout.common.out, "output directory");
  rollout_cmd->add_option("--goal", rollout.goal, "goal JSON: radius, center_x, center_y");
  rollout_cmd->add_option("--horizon", rollout.horizon, "steps per period");
  rollout_cmd->add_flag("--deterministic", rollout.deterministic, "act with the policy mean");
  rollout_cmd->add_option("--episodes", rollout.episodes, "number of episodes");

  PlanArgs plan;
  CLI::App* plan_cmd = app.add_subcommand("plan", "bimanual trajectory from waypoints");
  plan_cmd->add_option("waypoints", plan.waypoints, "waypoint file")->required();
  plan_cmd->add_option("demos", plan.demos, "demonstration JSONL")->required();
  AddCommon(plan_cmd, plan.common);
  plan_cmd->add_option("--points", plan.points, "output steps per arm");

  EvalArgs eval;
  CLI::App* eval_cmd = app.add_subcommand("eval", "merge reports or run the ablation");
  eval_cmd->add_option("inputs", eval.inputs, "report CSVs, run directories or checkpoints");
  AddCommon(eval_cmd, eval.common);
  eval_cmd->add_flag("--ablation", eval.ablation, "train and evaluate the ablation variants");
  eval_cmd->add_option("--variants", eval.variants, "ablation variants")->delimiter(',');
  eval_cmd->add_option("--seeds", eval.seeds, "ablation seeds")->delimiter(',');
  eval_cmd->add_option("--updates", eval.updates, "updates per ablation run");
  eval_cmd->add_option("--episodes", eval.episodes, "evaluation episodes per run");

  DemoArgs demo;
  CLI::App* demo_cmd = app.add_subcommand("demo-gen", "scripted demonstrations");
  AddCommon(demo_cmd, demo.common);
  demo_cmd->add_option("--count", demo.count, "number of rollouts");
  demo_cmd->add_option("--waypoints", demo.waypoints, "also write N waypoints from the first rollout");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }
  try {
    if (train_cmd->parsed()) return RunTrain(train);
    if (rollout_cmd->parsed()) return RunRollout(rollout);
    if (plan_cmd->parsed()) return RunPlan(plan);
    if (eval_cmd->parsed()) return RunEval(eval);
    if (demo_cmd->parsed()) return RunDemoGen(demo);
  } catch (const std::exception& e) {
    std::cerr << "dgform: " << e.what() << "\n";
    return ExitCodeFor(e);
  }
  return 1;
}
