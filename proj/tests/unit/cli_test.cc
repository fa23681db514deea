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

#include <gtest/gtest.h>
#include <sys/wait.h>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "dgform/cli/plot.h"
#include "dgform/cli/run.h"
#include "dgform/common/error.h"
#include "dgform/eval/ablation.h"
#include "dgform/net/checkpoint.h"

namespace dgform {
namespace {

namespace fs = std::filesystem;

struct Outcome {
  int code = -1;
  std::string output;
};

Outcome Invoke(const std::string& args, const std::string& env = "") {
  const std::string cmd = env + " " + DGFORM_BIN + " " + args + " 2>&1";
  Outcome o;
  FILE* pipe = popen(cmd.c_str(), "r");
  if (pipe == nullptr) return o;
  char buf[4096];
  while (size_t n = fread(buf, 1, sizeof(buf), pipe)) o.output.append(buf, n);
  const int status = pclose(pipe);
  o.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return o;
}

std::string Slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::vector<std::string> Lines(const fs::path& p) {
  std::ifstream in(p);
  std::vector<std::string> out;
  for (std::string line; std::getline(in, line);) out.push_back(line);
  return out;
}

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("dgform_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  std::string At(const std::string& rel) const { return (dir_ / rel).string(); }

  // Scripted demos and 50 waypoints under `rel`.
  void MakeDemos(const std::string& rel) {
    const Outcome o = Invoke("demo-gen --count 2 --waypoints 50 --out " + At(rel));
    ASSERT_EQ(o.code, 0) << o.output;
  }

  fs::path dir_;
};

TEST(RunConfig, JsonRoundtripAndSeedOverride) {
  RunConfig c;
  c.train.updates = 7;
  c.planner.points = 300;
  c.output_dir = "out";
  c.ApplySeed(9);
  const RunConfig back = RunConfigFromJson(RunConfigToJson(c));
  EXPECT_EQ(back.train, c.train);
  EXPECT_EQ(back.train.seed, 9u);
  EXPECT_EQ(back.planner.seed, 9u);
  EXPECT_EQ(back.planner.points, 300);
  EXPECT_EQ(back.output_dir, "out");
  EXPECT_THROW(RunConfigFromJson({{"trian", {}}}), ConfigError);
  EXPECT_THROW(RunConfigFromJson({{"seed", -1}}), ConfigError);
}

TEST(ResolveOutputDir, PrecedenceAndFreshness) {
  EXPECT_EQ(ResolveOutputDir("explicit", "cfg", "train"), fs::path("explicit"));
  const fs::path root = fs::temp_directory_path() / "dgform_resolve";
  fs::remove_all(root);
  setenv("DGFORM_OUT", root.c_str(), 1);
  const fs::path a = ResolveOutputDir("", "cfg", "train");
  EXPECT_EQ(a.parent_path(), root);
  EXPECT_EQ(a.filename().string().rfind("train-", 0), 0u);
  fs::create_directories(a);
  EXPECT_NE(ResolveOutputDir("", "cfg", "train"), a);
  unsetenv("DGFORM_OUT");
  EXPECT_EQ(ResolveOutputDir("", "cfg", "eval").parent_path(), fs::path("cfg"));
}

TEST(Plot, SvgIsDeterministicAndEscaped) {
  const std::vector<Bar> bars = {{"a<b", 1.0, 0.5}, {"c", -2.0, 0.0}};
  const std::string svg = BarChartSvg("iou & more", bars);
  EXPECT_EQ(svg, BarChartSvg("iou & more", bars));
  EXPECT_EQ(svg.rfind("<svg", 0), 0u);
  EXPECT_NE(svg.find("a&lt;b"), std::string::npos);
  EXPECT_NE(svg.find("iou &amp; more"), std::string::npos);
  EXPECT_EQ(svg.find("nan"), std::string::npos);
  const std::string line = LineChartSvg("r", "update", {{"run", {0, 1, 2}, {1, 2, 3}}});
  EXPECT_NE(line.find("<polyline"), std::string::npos);
  EXPECT_NE(LineChartSvg("empty", "x", {}).find("</svg>"), std::string::npos);
}

TEST(ExitCode, MapsErrorKinds) {
  EXPECT_EQ(ExitCodeFor(ConfigError("x")), 1);
  EXPECT_EQ(ExitCodeFor(ParseError("x")), 1);
  EXPECT_EQ(ExitCodeFor(VersionError("a/2", "a/1")), 1);
  EXPECT_EQ(ExitCodeFor(NumericalError("x")), 2);
  EXPECT_EQ(ExitCodeFor(TrainingError("loss_vf", "nan")), 2);
}

TEST_F(CliTest, UsageErrorsExitOne) {
  EXPECT_EQ(Invoke("").code, 1);
  EXPECT_EQ(Invoke("frobnicate").code, 1);
  EXPECT_EQ(Invoke("train --updates x").code, 1);
  EXPECT_EQ(Invoke("--help").code, 0);
}

TEST_F(CliTest, TrainZeroUpdatesWritesInitialCheckpointOnly) {
  const Outcome o = Invoke("train --updates 0 --seed 3 --out " + At("run"));
  ASSERT_EQ(o.code, 0) << o.output;
  std::vector<std::string> checkpoints;
  for (const auto& e : fs::directory_iterator(dir_ / "run" / "checkpoints")) {
    checkpoints.push_back(e.path().filename().string());
  }
  ASSERT_EQ(checkpoints, std::vector<std::string>{"update_00000.json"});
  const Checkpoint ck = LoadCheckpoint(At("run/checkpoints/update_00000.json"));
  EXPECT_EQ(ck.update, 0);
  EXPECT_EQ(ck.seed, 3u);
  EXPECT_EQ(Lines(dir_ / "run" / "metrics.csv").size(), 1u);
  EXPECT_TRUE(fs::exists(dir_ / "run" / "manifest.json"));
  EXPECT_TRUE(fs::exists(dir_ / "run" / "metadata.json"));
}

TEST_F(CliTest, MissingConfigNamesThePath) {
  const Outcome o = Invoke("train -c " + At("absent.json"));
  EXPECT_EQ(o.code, 1);
  EXPECT_NE(o.output.find(At("absent.json")), std::string::npos) << o.output;
  std::ofstream(At("bad.json")) << R"({"train": {"updates": -2}})";
  EXPECT_EQ(Invoke("train -c " + At("bad.json")).code, 1);
}

TEST_F(CliTest, LagrangeRunLogsNonNegativeAlpha) {
  MakeDemos("demos");
  const Outcome o = Invoke("train --updates 3 --variant dgform-il --demos " +
                        At("demos/demos.jsonl") + " --out " + At("run"));
  ASSERT_EQ(o.code, 0) << o.output;
  const std::vector<std::string> lines = Lines(dir_ / "run" / "metrics.csv");
  ASSERT_EQ(lines.size(), 4u);
  EXPECT_NE(lines[0].find(",alpha,"), std::string::npos);
  for (size_t i = 1; i < lines.size(); ++i) {
    std::stringstream ss(lines[i]);
    std::string cell;
    for (int c = 0; c <= 7; ++c) std::getline(ss, cell, ',');
    EXPECT_GE(std::stod(cell), 0.0) << lines[i];
  }
  EXPECT_TRUE(fs::exists(dir_ / "run" / "checkpoints" / "update_00003.json"));
}

TEST_F(CliTest, TrainIsByteIdenticalAcrossRuns) {
  for (const char* name : {"a", "b"}) {
    const Outcome o = Invoke(std::string("train --updates 2 --seed 8 --out ") + At(name));
    ASSERT_EQ(o.code, 0) << o.output;
  }
  for (const char* f : {"metrics.csv", "summary.json", "manifest.json",
                        "checkpoints/update_00002.json"}) {
    EXPECT_EQ(Slurp(dir_ / "a" / f), Slurp(dir_ / "b" / f)) << f;
  }
  EXPECT_EQ(Slurp(dir_ / "a" / "manifest.json").find("_utc"), std::string::npos);
}

TEST_F(CliTest, OutputRootFromEnvironment) {
  const Outcome o = Invoke("demo-gen --count 1", "DGFORM_OUT=" + At("root"));
  ASSERT_EQ(o.code, 0) << o.output;
  int runs = 0;
  for (const auto& e : fs::directory_iterator(dir_ / "root")) {
    ++runs;
    EXPECT_TRUE(fs::exists(e.path() / "demos.jsonl"));
  }
  EXPECT_EQ(runs, 1);
}

TEST_F(CliTest, RolloutIsReproducibleWithOneRowPerPeriod) {
  ASSERT_EQ(Invoke("train --updates 1 --out " + At("run")).code, 0);
  const std::string ck = At("run/checkpoints/update_00001.json");
  for (const char* name : {"r1", "r2"}) {
    const Outcome o = Invoke("rollout " + ck + " --deterministic --out " + At(name));
    ASSERT_EQ(o.code, 0) << o.output;
  }
  EXPECT_EQ(Slurp(dir_ / "r1" / "trajectory.csv"), Slurp(dir_ / "r2" / "trajectory.csv"));
  // 250 steps at the default horizon 50
  EXPECT_EQ(Lines(dir_ / "r1" / "periods.csv").size(), 1u + 5u);
  EXPECT_EQ(Lines(dir_ / "r1" / "trajectory.csv").size(), 1u + 250u);
  EXPECT_TRUE(fs::exists(dir_ / "r1" / "snapshots" / "episode0_period004.ppm"));
  const std::string ppm = Slurp(dir_ / "r1" / "snapshots" / "episode0_initial.ppm");
  EXPECT_EQ(ppm.rfind("P6\n128 128\n255\n", 0), 0u);

  const Outcome h = Invoke("rollout " + ck + " --horizon 40 --out " + At("r3"));
  ASSERT_EQ(h.code, 0) << h.output;
  EXPECT_EQ(Lines(dir_ / "r3" / "periods.csv").size(), 1u + 7u);

  std::string text = Slurp(ck);
  text.replace(text.find("dgform-checkpoint/1"), 19, "dgform-checkpoint/9");
  std::ofstream(At("old.json")) << text;
  const Outcome v = Invoke("rollout " + At("old.json") + " --out " + At("r4"));
  EXPECT_NE(v.code, 0);
  EXPECT_NE(v.output.find("dgform-checkpoint/9"), std::string::npos) << v.output;
}

TEST_F(CliTest, PlanExpandsFiftyWaypoints) {
  MakeDemos("demos");
  EXPECT_EQ(Lines(dir_ / "demos" / "waypoints.txt").size(), 51u);  // comment + 50
  const Outcome o = Invoke("plan " + At("demos/waypoints.txt") + " " + At("demos/demos.jsonl") +
                        " --out " + At("plan"));
  ASSERT_EQ(o.code, 0) << o.output;
  EXPECT_EQ(Lines(dir_ / "plan" / "trajectory.csv").size(), 1u + 10000u);
  const nlohmann::json s = ReadJsonFile(At("plan/smoothness.json"));
  EXPECT_EQ(s.at("points").get<int>(), 10000);
  EXPECT_TRUE(s.at("within_limit").get<bool>());

  const Outcome small = Invoke("plan " + At("demos/waypoints.txt") + " " +
                            At("demos/demos.jsonl") + " --points 500 --out " + At("small"));
  ASSERT_EQ(small.code, 0) << small.output;
  EXPECT_EQ(Lines(dir_ / "small" / "trajectory.csv").size(), 1u + 500u);

  std::ofstream(At("bad.txt")) << "0 0 0.1 1 0 0 0 0 0 0.1 1 0 0 0\n0 0 0.1 1 0 0\n";
  const Outcome bad = Invoke("plan " + At("bad.txt") + " " + At("demos/demos.jsonl") + " --out " +
                          At("bad"));
  EXPECT_EQ(bad.code, 1);
  EXPECT_NE(bad.output.find("line 2"), std::string::npos) << bad.output;
}

TEST_F(CliTest, EvalMergesSortsAndPlots) {
  std::vector<AblationRow> rows(3);
  rows[0].variant = "ppo-rgbd";
  rows[0].seed = 1;
  rows[1].variant = "dgform";
  rows[1].seed = 2;
  rows[2].variant = "ppo-rgbd";
  rows[2].seed = 0;
  WriteAblationCsv(At("a.csv"), {rows[0], rows[1]});
  WriteAblationCsv(At("b.csv"), {rows[2], rows[1]});
  const Outcome o = Invoke("eval " + At("a.csv") + " " + At("b.csv") + " --out " + At("eval"));
  ASSERT_EQ(o.code, 0) << o.output;
  const std::vector<std::string> lines = Lines(dir_ / "eval" / "report.csv");
  ASSERT_EQ(lines.size(), 4u);
  EXPECT_EQ(lines[1].substr(0, 9), "dgform,2,");
  EXPECT_EQ(lines[2].substr(0, 11), "ppo-rgbd,0,");
  EXPECT_EQ(lines[3].substr(0, 11), "ppo-rgbd,1,");
  for (const char* plot : {"reward.svg", "iou.svg", "sdf.svg", "density.svg"}) {
    EXPECT_TRUE(fs::exists(dir_ / "eval" / plot)) << plot;
  }
  EXPECT_EQ(Invoke("eval --out " + At("none")).code, 1);
}

TEST_F(CliTest, EvalOneCheckpointGivesOneRow) {
  ASSERT_EQ(Invoke("train --updates 1 --out " + At("run")).code, 0);
  const Outcome o = Invoke("eval " + At("run/checkpoints/update_00001.json") +
                        " --episodes 1 --out " + At("eval"));
  ASSERT_EQ(o.code, 0) << o.output;
  EXPECT_EQ(Lines(dir_ / "eval" / "report.csv").size(), 2u);
  const Outcome curves = Invoke("eval " + At("run") + " --out " + At("curves"));
  ASSERT_EQ(curves.code, 0) << curves.output;
  EXPECT_TRUE(fs::exists(dir_ / "curves" / "learning_curve.svg"));
}

TEST_F(CliTest, EvalAblationWritesPerJobFiles) {
  const Outcome o = Invoke("eval --ablation --variants random,ppo-rgbd --seeds 0 --updates 1 "
                        "--episodes 1 --out " + At("eval"));
  ASSERT_EQ(o.code, 0) << o.output;
  EXPECT_TRUE(fs::exists(dir_ / "eval" / "reports" / "random-seed0.csv"));
  EXPECT_TRUE(fs::exists(dir_ / "eval" / "reports" / "ppo-rgbd-seed0.csv"));
  EXPECT_EQ(Lines(dir_ / "eval" / "report.csv").size(), 3u);
}

}  // namespace
}  // namespace dgform
