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

#include "dgform/planner/birp.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <set>
#include <sstream>

#include "dgform/common/error.h"

namespace dgform {
namespace {

using Eigen::MatrixXd;
using Eigen::VectorXd;
using nlohmann::json;

constexpr int kPoseDim = EePose::kDim;

VectorXd ToVector(const EePose& pose) {
  const auto a = pose.ToArray();
  return Eigen::Map<const VectorXd>(a.data(), kPoseDim);
}

EePose ToPose(const VectorXd& v) {
  EePose p;
  for (int i = 0; i < 3; ++i) p.position[i] = v[i];
  double norm = 0.0;
  for (int i = 0; i < 4; ++i) norm += v[3 + i] * v[3 + i];
  norm = std::sqrt(norm);
  if (norm > 1e-12) {
    for (int i = 0; i < 4; ++i) p.quaternion[i] = v[3 + i] / norm;
  }
  return p;
}

Gaussian Isotropic(const VectorXd& mean, double variance) {
  return {mean, variance * MatrixXd::Identity(mean.size(), mean.size())};
}

template <typename T>
void Read(const json& j, const char* key, T& field) {
  if (!j.contains(key)) return;
  try {
    field = j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ConfigError(std::string("planner config field '") + key + "': " + e.what());
  }
}

// Per-step linear interpolation of one arm's waypoints.
std::vector<VectorXd> Interpolate(const std::vector<VectorXd>& points,
                                  const std::vector<int>& at, int steps) {
  std::vector<VectorXd> out(steps);
  size_t seg = 0;
  for (int t = 0; t < steps; ++t) {
    while (seg + 2 < at.size() && t > at[seg + 1]) ++seg;
    const double span = at[seg + 1] - at[seg];
    const double s = span > 0 ? std::clamp((t - at[seg]) / span, 0.0, 1.0) : 0.0;
    out[t] = (1.0 - s) * points[seg] + s * points[seg + 1];
  }
  return out;
}

}  // namespace

int ComponentAtStep(int step, int components, int steps) {
  const long long k = static_cast<long long>(step) * components / steps;
  return static_cast<int>(std::clamp<long long>(k, 0, components - 1));
}

std::vector<Gaussian> BuildReference(const std::vector<Gmm>& sources,
                                     const std::vector<FrameSequence>& frames, int steps) {
  if (sources.empty()) throw ContractError("build_reference: no sources");
  if (frames.size() != sources.size()) {
    throw ContractError("build_reference: one frame sequence per source required");
  }
  if (steps < 1) throw ContractError("build_reference: steps must be >= 1");
  const int k = sources[0].size();
  for (size_t j = 0; j < sources.size(); ++j) {
    if (sources[j].size() != k) {
      throw ContractError("build_reference: sources have " + std::to_string(k) + " and " +
                          std::to_string(sources[j].size()) + " components");
    }
    if (sources[j].dim() != sources[0].dim()) {
      throw ContractError("build_reference: source dimensions differ");
    }
    if (frames[j].size() != 1 && static_cast<int>(frames[j].size()) != steps) {
      throw ContractError("build_reference: frame sequence must hold 1 or `steps` frames");
    }
  }
  std::vector<Gaussian> out;
  out.reserve(steps);
  std::vector<Gaussian> parts(sources.size());
  for (int t = 0; t < steps; ++t) {
    const int c = ComponentAtStep(t, k, steps);
    for (size_t j = 0; j < sources.size(); ++j) {
      const TaskFrame& f = frames[j].size() == 1 ? frames[j][0] : frames[j][t];
      parts[j] = FrameTransform(sources[j].components[c], f);
    }
    out.push_back(ProductOfGaussians(parts));
  }
  return out;
}

void PlannerConfig::Validate() const {
  if (components < 1) throw ConfigError("planner components must be >= 1");
  if (order < 1) throw ConfigError("planner order must be >= 1");
  if (!(control_weight > 0)) throw ConfigError("planner control_weight must be positive");
  if (points < 2) throw ConfigError("planner points must be >= 2");
  if (!(total_time > 0)) throw ConfigError("planner total_time must be positive");
  if (!(waypoint_variance > 0) || !(free_variance > 0)) {
    throw ConfigError("planner variances must be positive");
  }
  if (!(coordination_weight >= 0)) throw ConfigError("coordination_weight must be >= 0");
  if (!(max_acceleration > 0)) throw ConfigError("max_acceleration must be positive");
}

PlannerConfig PlannerConfigFromJson(const json& j) {
  static const std::set<std::string> kKeys{
      "components",   "order",        "control_weight",       "points",
      "total_time",   "waypoint_variance", "free_variance",   "coordination_weight",
      "max_acceleration", "seed",     "gmm_max_iterations",   "gmm_tolerance",
      "gmm_regularization"};
  if (!j.is_object()) throw ConfigError("planner config must be a JSON object");
  for (const auto& [key, value] : j.items()) {
    if (!kKeys.count(key)) throw ConfigError("unknown planner config key '" + key + "'");
  }
  PlannerConfig c;
  Read(j, "components", c.components);
  Read(j, "order", c.order);
  Read(j, "control_weight", c.control_weight);
  Read(j, "points", c.points);
  Read(j, "total_time", c.total_time);
  Read(j, "waypoint_variance", c.waypoint_variance);
  Read(j, "free_variance", c.free_variance);
  Read(j, "coordination_weight", c.coordination_weight);
  Read(j, "max_acceleration", c.max_acceleration);
  Read(j, "seed", c.seed);
  Read(j, "gmm_max_iterations", c.gmm.max_iterations);
  Read(j, "gmm_tolerance", c.gmm.tolerance);
  Read(j, "gmm_regularization", c.gmm.regularization);
  c.Validate();
  return c;
}

json PlannerConfigToJson(const PlannerConfig& c) {
  return {{"components", c.components},
          {"order", c.order},
          {"control_weight", c.control_weight},
          {"points", c.points},
          {"total_time", c.total_time},
          {"waypoint_variance", c.waypoint_variance},
          {"free_variance", c.free_variance},
          {"coordination_weight", c.coordination_weight},
          {"max_acceleration", c.max_acceleration},
          {"seed", c.seed},
          {"gmm_max_iterations", c.gmm.max_iterations},
          {"gmm_tolerance", c.gmm.tolerance},
          {"gmm_regularization", c.gmm.regularization}};
}

TaskFrame CoordinationFrame(const EePose& other) {
  const VectorXd v = ToVector(other);
  TaskFrame f{MatrixXd::Identity(kPoseDim, kPoseDim), v};
  Eigen::Quaterniond q(other.quaternion[0], other.quaternion[1], other.quaternion[2],
                       other.quaternion[3]);
  if (q.norm() > 1e-12) f.A.topLeftCorner(3, 3) = q.normalized().toRotationMatrix();
  return f;
}

VectorXd RelativePose(const BimanualPose& pose, int arm) {
  const EePose& self = arm == 0 ? pose.left : pose.right;
  const EePose& other = arm == 0 ? pose.right : pose.left;
  const TaskFrame f = CoordinationFrame(other);
  const VectorXd s = ToVector(self), o = ToVector(other);
  // the frame offset is the other arm itself, already subtracted below
  return RelativeTrajectory(std::span(&s, 1), std::span(&o, 1),
                            {f.A, VectorXd::Zero(kPoseDim)})[0];
}

Gmm FitCoordinationGmm(const DemoDataset& demos, int arm, int components,
                       std::uint64_t seed, const GmmFitOptions& options) {
  if (arm != 0 && arm != 1) throw ContractError("coordination gmm: arm must be 0 or 1");
  std::vector<VectorXd> samples;
  for (const DemoRollout& r : demos.rollouts) {
    const double last = std::max<size_t>(1, r.steps.size() - 1);
    for (size_t t = 0; t < r.steps.size(); ++t) {
      VectorXd x(kPoseDim + 1);
      x[0] = t / last;
      x.tail(kPoseDim) = RelativePose(r.steps[t].zeta, arm);
      samples.push_back(x);
    }
  }
  if (samples.empty()) throw ContractError("coordination gmm: demonstrations hold no steps");
  const int k = std::min<int>(components, static_cast<int>(samples.size()));
  const Gmm joint = FitGmmEm(samples, k, seed, options).gmm;
  std::vector<int> order(k);
  for (int i = 0; i < k; ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
    return joint.components[a].mean[0] < joint.components[b].mean[0];
  });
  Gmm out;
  for (int i : order) {
    out.weights.push_back(joint.weights[i]);
    out.components.push_back(Marginal(joint.components[i], 1, kPoseDim));
  }
  return out;
}

PlanResult PlanBimanual(const std::vector<BimanualPose>& waypoints, const DemoDataset& demos,
                        const PlannerConfig& config) {
  config.Validate();
  const int n = static_cast<int>(waypoints.size());
  if (n < 2) throw ContractError("plan_bimanual: need at least two waypoints");
  if (config.points < n) throw ContractError("plan_bimanual: fewer points than waypoints");
  std::vector<VectorXd> wp[2];
  for (const BimanualPose& w : waypoints) {
    wp[0].push_back(ToVector(w.left));
    wp[1].push_back(ToVector(w.right));
    if (!wp[0].back().allFinite() || !wp[1].back().allFinite()) {
      throw ContractError("plan_bimanual: non-finite waypoint");
    }
  }
  const int steps = config.points;
  PlanResult result;
  for (int arm = 0; arm < 2; ++arm) {
    result.coordination[arm] =
        FitCoordinationGmm(demos, arm, config.components, config.seed, config.gmm);
  }
  for (int i = 0; i < n; ++i) {
    result.waypoint_steps.push_back(static_cast<int>(
        std::lround(static_cast<double>(i) * (steps - 1) / (n - 1))));
  }
  std::vector<bool> at_waypoint(steps, false);
  for (int s : result.waypoint_steps) at_waypoint[s] = true;
  const std::vector<VectorXd> interp[2] = {Interpolate(wp[0], result.waypoint_steps, steps),
                                           Interpolate(wp[1], result.waypoint_steps, steps)};

  const double dt = config.total_time / steps;
  const LqtOptions lqt{config.order, dt, config.control_weight};
  // Pass 1 tracks each arm's own waypoints. Pass 2 adds the coordination
  // term anchored to the other arm's latest plan (left against right's pass-1
  // plan, then right against the new left), which is smooth where the
  // waypoint interpolation has kinks.
  auto solve = [&](int arm, const MatrixXd* other) {
    const Gmm& coord = result.coordination[arm];
    std::vector<Gaussian> reference;
    reference.reserve(steps);
    for (int t = 0; t < steps; ++t) {
      const Gaussian track = Isotropic(
          interp[arm][t], at_waypoint[t] ? config.waypoint_variance : config.free_variance);
      if (other == nullptr) {
        reference.push_back(track);
        continue;
      }
      Gaussian rel = coord.components[ComponentAtStep(t, coord.size(), steps)];
      rel.cov /= config.coordination_weight;
      const Gaussian mapped =
          FrameTransform(rel, CoordinationFrame(ToPose(other->row(t).transpose())));
      const Gaussian parts[2] = {track, mapped};
      reference.push_back(ProductOfGaussians(parts));
    }
    VectorXd x0 = VectorXd::Zero(kPoseDim * config.order);
    x0.head(kPoseDim) = reference[0].mean;
    return LqtSolve(reference, x0, lqt).Positions();
  };
  MatrixXd positions[2] = {solve(0, nullptr), solve(1, nullptr)};
  if (config.coordination_weight > 0.0) {
    positions[0] = solve(0, &positions[1]);
    positions[1] = solve(1, &positions[0]);
  }

  BimanualTrajectory& traj = result.trajectory;
  for (int t = 0; t < steps; ++t) {
    traj.time.push_back(t * dt);
    traj.left.push_back(ToPose(positions[0].row(t).transpose()));
    traj.right.push_back(ToPose(positions[1].row(t).transpose()));
  }
  result.smoothness =
      MeasureSmoothness(traj, waypoints, result.waypoint_steps, config.max_acceleration);
  return result;
}

double RelativePoseError(const BimanualTrajectory& trajectory,
                         const std::array<Gmm, 2>& coordination) {
  const int steps = trajectory.size();
  if (steps == 0) return 0.0;
  double total = 0.0;
  for (int t = 0; t < steps; ++t) {
    const BimanualPose pose{trajectory.left[t], trajectory.right[t]};
    for (int arm = 0; arm < 2; ++arm) {
      const int k = ComponentAtStep(t, coordination[arm].size(), steps);
      total += (RelativePose(pose, arm) - coordination[arm].components[k].mean).norm();
    }
  }
  return total / (2.0 * steps);
}

SmoothnessReport MeasureSmoothness(const BimanualTrajectory& trajectory,
                                   const std::vector<BimanualPose>& waypoints,
                                   const std::vector<int>& waypoint_steps,
                                   double max_acceleration) {
  SmoothnessReport r;
  const int steps = trajectory.size();
  for (const auto* arm : {&trajectory.left, &trajectory.right}) {
    for (int t = 1; t + 1 < steps; ++t) {
      const double dt = trajectory.time[t + 1] - trajectory.time[t];
      double sq = 0.0;
      for (int i = 0; i < 3; ++i) {
        const double a = (*arm)[t + 1].position[i] - 2.0 * (*arm)[t].position[i] +
                         (*arm)[t - 1].position[i];
        sq += a * a;
      }
      r.max_acceleration = std::max(r.max_acceleration, std::sqrt(sq) / (dt * dt));
    }
  }
  for (size_t i = 0; i < waypoints.size() && i < waypoint_steps.size(); ++i) {
    const int t = waypoint_steps[i];
    if (t < 0 || t >= steps) continue;
    for (int arm = 0; arm < 2; ++arm) {
      const EePose& want = arm == 0 ? waypoints[i].left : waypoints[i].right;
      const EePose& got = arm == 0 ? trajectory.left[t] : trajectory.right[t];
      double sq = 0.0;
      for (int k = 0; k < 3; ++k) sq += std::pow(got.position[k] - want.position[k], 2);
      r.max_waypoint_error = std::max(r.max_waypoint_error, std::sqrt(sq));
    }
  }
  r.within_limit = r.max_acceleration <= max_acceleration;
  return r;
}

void WriteTrajectoryCsv(const std::string& path, const BimanualTrajectory& trajectory) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write trajectory '" + path + "'");
  out << "t";
  for (const char* arm : {"left", "right"}) {
    for (const char* c : {"x", "y", "z", "qw", "qx", "qy", "qz"}) out << ',' << arm << '_' << c;
  }
  out << '\n';
  char buf[32];
  for (int t = 0; t < trajectory.size(); ++t) {
    std::snprintf(buf, sizeof(buf), "%.10g", trajectory.time[t]);
    out << buf;
    for (const EePose* p : {&trajectory.left[t], &trajectory.right[t]}) {
      for (double v : p->ToArray()) {
        std::snprintf(buf, sizeof(buf), ",%.10g", v);
        out << buf;
      }
    }
    out << '\n';
  }
  if (!out) throw ConfigError("failed writing trajectory '" + path + "'");
}

json TrajectoryHeader(const BimanualTrajectory& trajectory, int order) {
  const double dt = trajectory.size() > 1 ? trajectory.time[1] - trajectory.time[0] : 0.0;
  return {{"dt", dt}, {"order", order}, {"dim", kPoseDim}, {"points", trajectory.size()}};
}

std::vector<BimanualPose> LoadWaypoints(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open waypoints '" + path + "'");
  std::vector<BimanualPose> out;
  std::string line;
  for (int number = 1; std::getline(in, line); ++number) {
    const size_t first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    std::replace(line.begin(), line.end(), ',', ' ');
    std::istringstream fields(line);
    std::vector<double> values;
    for (std::string tok; fields >> tok;) {
      char* end = nullptr;
      const double v = std::strtod(tok.c_str(), &end);
      if (end == tok.c_str() || *end != '\0' || !std::isfinite(v)) {
        throw ParseError("waypoints: bad number '" + tok + "'", number);
      }
      values.push_back(v);
    }
    if (static_cast<int>(values.size()) != BimanualPose::kDim) {
      throw ParseError("waypoints: expected " + std::to_string(BimanualPose::kDim) +
                           " values, got " + std::to_string(values.size()),
                       number);
    }
    out.push_back(BimanualPose::FromVector(values));
  }
  if (out.empty()) throw ParseError("waypoints: no waypoints in '" + path + "'");
  return out;
}

}  // namespace dgform
