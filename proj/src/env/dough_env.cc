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

#include "dgform/env/dough_env.h"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "dgform/common/error.h"
#include "dgform/common/rng.h"

namespace dgform {
namespace {

constexpr double kPi = std::numbers::pi;

// shortest yaw change modulo pi (the pin is symmetric end-to-end)
double WrapHalfTurn(double angle) {
  angle = std::fmod(angle, kPi);
  if (angle > kPi / 2) angle -= kPi;
  if (angle <= -kPi / 2) angle += kPi;
  return angle;
}

double DistanceToAxis(const PinPose& pin, double x, double y) {
  const double ux = std::cos(pin.yaw), uy = std::sin(pin.yaw);
  const double dx = x - pin.x, dy = y - pin.y;
  const double s = std::clamp(dx * ux + dy * uy, -pin.half_length,
                              pin.half_length);
  const double px = dx - s * ux, py = dy - s * uy;
  return std::sqrt(px * px + py * py);
}

}  // namespace

bool UnderPin(const PinPose& pin, double x, double y) {
  return DistanceToAxis(pin, x, y) <= pin.radius;
}

void EnvConfig::Validate() const {
  auto require = [](bool ok, const char* what) {
    if (!ok) throw ConfigError(std::string("invalid env config: ") + what);
  };
  require(grid_size >= 32, "grid_size must be >= 32");
  require(board_size > 0.0, "board_size must be positive");
  require(volume > 0.0, "volume must be positive");
  require(mound_radius > 0.0 && mound_radius < 0.5 * board_size,
          "mound_radius must lie inside the board");
  require(mound_center_jitter >= 0.0 &&
              mound_center_jitter + mound_radius < 0.5 * board_size,
          "mound jitter pushes the mound off the board");
  require(mound_aspect_jitter >= 0.0 && mound_aspect_jitter < 1.0,
          "mound_aspect_jitter must be in [0, 1)");
  require(pin_radius > 0.0, "pin_radius must be positive");
  require(pin_half_length > 0.0, "pin_half_length must be positive");
  require(pin_start_z >= pin_radius && pin_start_z <= pin_max_z,
          "pin_start_z must lie in [pin_radius, pin_max_z]");
  require(horizon >= 1, "horizon must be >= 1");
  require(camera_resolution >= 8, "camera_resolution must be >= 8");
  require(camera_height > pin_max_z + pin_radius,
          "camera must sit above the pin workspace");
  require(mask_threshold >= 0.0, "mask_threshold must be non-negative");
  require(goal_radius > 0.0 && goal_radius <= 0.5 * board_size,
          "goal_radius must lie inside the board");
}

GoalSpec MakeGoal(GoalKind kind, const GoalParams& params,
                  const EnvConfig& config) {
  if (kind != GoalKind::kFlatDisk) throw ConfigError("unknown goal kind");
  const double half = 0.5 * config.board_size;
  if (params.radius <= 0.0 ||
      params.radius + std::max(std::abs(params.center_x),
                               std::abs(params.center_y)) >
          half) {
    throw ConfigError("goal disk radius exceeds the board");
  }
  if (params.volume <= 0.0) throw ConfigError("goal volume must be positive");
  GoalSpec goal;
  goal.grid_size = config.grid_size;
  goal.cell_size = config.cell_size();
  const int n = config.grid_size;
  goal.goal_heights.assign(n * n, 0.0);
  goal.goal_mask.assign(n * n, 0);
  const double height = params.volume / (kPi * params.radius * params.radius);
  DoughState probe;
  probe.grid_size = n;
  probe.cell_size = goal.cell_size;
  for (int r = 0; r < n; ++r) {
    for (int c = 0; c < n; ++c) {
      const double dx = probe.CellX(c) - params.center_x;
      const double dy = probe.CellY(r) - params.center_y;
      if (dx * dx + dy * dy <= params.radius * params.radius) {
        goal.goal_mask[r * n + c] = 1;
        goal.goal_heights[r * n + c] = height;
      }
    }
  }
  goal.description = "flat disk r=" + std::to_string(params.radius) +
                     " h=" + std::to_string(height);
  return goal;
}

GoalSpec DefaultGoal(const EnvConfig& config) {
  GoalParams params;
  params.radius = config.goal_radius;
  params.volume = config.volume;
  return MakeGoal(GoalKind::kFlatDisk, params, config);
}

PinPose DecodePin(const BimanualPose& action, const EnvConfig& config) {
  const auto& l = action.left.position;
  const auto& r = action.right.position;
  PinPose pin;
  pin.x = 0.5 * (l[0] + r[0]);
  pin.y = 0.5 * (l[1] + r[1]);
  pin.z = 0.5 * (l[2] + r[2]);
  const double dx = l[0] - r[0], dy = l[1] - r[1];
  pin.yaw = (dx == 0.0 && dy == 0.0) ? 0.0 : std::atan2(dy, dx);
  pin.half_length = config.pin_half_length;
  pin.radius = config.pin_radius;
  return pin;
}

BimanualPose EncodePin(const PinPose& pin) {
  const double ux = std::cos(pin.yaw), uy = std::sin(pin.yaw);
  EePose left, right;
  left.position = {pin.x + pin.half_length * ux, pin.y + pin.half_length * uy,
                   pin.z};
  right.position = {pin.x - pin.half_length * ux,
                    pin.y - pin.half_length * uy, pin.z};
  left.quaternion = {std::cos(0.5 * pin.yaw), 0.0, 0.0,
                     std::sin(0.5 * pin.yaw)};
  right.quaternion = left.quaternion;
  return {left, right};
}

DoughEnv::DoughEnv(EnvConfig config, GoalSpec goal)
    : config_(config), goal_(std::move(goal)) {
  config_.Validate();
  if (goal_.grid_size != config_.grid_size) {
    throw ConfigError("goal grid does not match env grid");
  }
}

DoughEnv::DoughEnv(EnvConfig config)
    : DoughEnv(config, DefaultGoal(config)) {}

PinPose DoughEnv::StartPin() const {
  PinPose pin;
  pin.x = 0.0;
  pin.y = 0.0;
  pin.z = config_.pin_start_z;
  pin.yaw = 0.0;
  pin.half_length = config_.pin_half_length;
  pin.radius = config_.pin_radius;
  return pin;
}

DoughState DoughEnv::ResetPin(DoughState state) const {
  state.pin = StartPin();
  return state;
}

std::pair<DoughState, RgbdObs> DoughEnv::Reset(std::uint64_t seed) const {
  Rng rng(seed);
  const double jitter = config_.mound_center_jitter;
  const double cx = rng.Uniform(-jitter, jitter);
  const double cy = rng.Uniform(-jitter, jitter);
  const double aspect = 1.0 + rng.Uniform(-config_.mound_aspect_jitter,
                                          config_.mound_aspect_jitter);
  const double theta = rng.Uniform(0.0, kPi);
  const double rx = config_.mound_radius * aspect;
  const double ry = config_.mound_radius / aspect;

  DoughState state;
  state.grid_size = config_.grid_size;
  state.cell_size = config_.cell_size();
  state.heights.assign(state.grid_size * state.grid_size, 0.0);
  const double ct = std::cos(theta), st = std::sin(theta);
  double total = 0.0;
  for (int r = 0; r < state.grid_size; ++r) {
    for (int c = 0; c < state.grid_size; ++c) {
      const double dx = state.CellX(c) - cx, dy = state.CellY(r) - cy;
      const double u = (dx * ct + dy * st) / rx;
      const double v = (-dx * st + dy * ct) / ry;
      const double h = std::max(0.0, 1.0 - u * u - v * v);
      state.height(r, c) = h;
      total += h;
    }
  }
  if (total <= 0.0) throw ConfigError("mound does not cover any cell");
  const double scale = config_.volume / (total * state.cell_size * state.cell_size);
  for (double& h : state.heights) h *= scale;
  state.pin = StartPin();
  state.time_index = 0;
  RgbdObs obs = Render(state);
  return {std::move(state), std::move(obs)};
}

double DoughEnv::Flatten(DoughState& state, const PinPose& pin) const {
  const int n = state.grid_size;
  const double cs = state.cell_size;
  const double clearance = pin.Clearance();
  const double reach = pin.half_length + pin.radius;
  const double half = 0.5 * n * cs;
  // cell index window around the capsule, padded by one ring
  auto col_of = [&](double x) { return static_cast<int>(std::floor((x + half) / cs)); };
  auto row_of = [&](double y) { return static_cast<int>(std::floor((half - y) / cs)); };
  const int c0 = std::max(0, col_of(pin.x - reach) - 1);
  const int c1 = std::min(n - 1, col_of(pin.x + reach) + 1);
  const int r0 = std::max(0, row_of(pin.y + reach) - 1);
  const int r1 = std::min(n - 1, row_of(pin.y - reach) + 1);
  if (c0 > c1 || r0 > r1) return 0.0;
  const int w = c1 - c0 + 1, h = r1 - r0 + 1;
  std::vector<std::uint8_t> covered(w * h, 0);
  double excess = 0.0;
  for (int r = r0; r <= r1; ++r) {
    for (int c = c0; c <= c1; ++c) {
      if (!UnderPin(pin, state.CellX(c), state.CellY(r))) continue;
      covered[(r - r0) * w + (c - c0)] = 1;
      excess += std::max(0.0, state.height(r, c) - clearance);
    }
  }
  if (excess <= 0.0) return 0.0;

  std::vector<std::pair<int, double>> ring;
  double weight_sum = 0.0;
  for (int r = r0; r <= r1; ++r) {
    for (int c = c0; c <= c1; ++c) {
      if (covered[(r - r0) * w + (c - c0)]) continue;
      bool adjacent = false;
      for (int dr = -1; dr <= 1 && !adjacent; ++dr) {
        for (int dc = -1; dc <= 1 && !adjacent; ++dc) {
          const int rr = r - r0 + dr, cc = c - c0 + dc;
          if (rr >= 0 && rr < h && cc >= 0 && cc < w && covered[rr * w + cc]) {
            adjacent = true;
          }
        }
      }
      if (!adjacent) continue;
      const double d = std::max(
          0.0,
          (DistanceToAxis(pin, state.CellX(c), state.CellY(r)) - pin.radius) /
              cs);
      const double weight = 1.0 / (1.0 + d);
      ring.emplace_back(r * n + c, weight);
      weight_sum += weight;
    }
  }
  // the capsule covers every reachable cell; nowhere to push material
  if (ring.empty()) return 0.0;
  for (int r = r0; r <= r1; ++r) {
    for (int c = c0; c <= c1; ++c) {
      if (covered[(r - r0) * w + (c - c0)]) {
        state.height(r, c) = std::min(state.height(r, c), clearance);
      }
    }
  }
  for (const auto& [index, weight] : ring) {
    state.heights[index] += excess * weight / weight_sum;
  }
  return excess;
}

StepResult DoughEnv::Step(const DoughState& state,
                          const BimanualPose& action) const {
  for (double v : action.ToVector()) {
    if (!std::isfinite(v)) throw ActionError("non-finite value in action");
  }
  StepResult result;
  PinPose target = DecodePin(action, config_);
  const double half = 0.5 * config_.board_size;
  const PinPose requested = target;
  target.x = std::clamp(target.x, -half, half);
  target.y = std::clamp(target.y, -half, half);
  target.z = std::clamp(target.z, config_.pin_radius, config_.pin_max_z);
  result.clipped = !(requested == target);

  result.state = state;
  DoughState& next = result.state;
  const PinPose start = state.pin;
  const double dyaw = WrapHalfTurn(target.yaw - start.yaw);
  const double travel =
      std::hypot(target.x - start.x, target.y - start.y) +
      config_.pin_half_length * std::abs(dyaw);
  const double lift = std::abs(target.z - start.z);
  const double increment = 0.5 * config_.cell_size();
  const int substeps =
      std::max(1, static_cast<int>(std::ceil(std::max(travel, lift) / increment)));
  for (int k = 1; k <= substeps; ++k) {
    const double s = static_cast<double>(k) / substeps;
    PinPose p = target;
    p.x = start.x + s * (target.x - start.x);
    p.y = start.y + s * (target.y - start.y);
    p.z = start.z + s * (target.z - start.z);
    p.yaw = start.yaw + s * dyaw;
    Flatten(next, p);
  }
  next.pin = target;
  next.time_index = state.time_index + 1;

  const MetricSnapshot before = Metrics(state);
  result.metrics = Metrics(next);
  const RewardWeights& w = config_.reward;
  result.reward = w.sdf * (before.sdf - result.metrics.sdf) +
                  w.iou * (result.metrics.iou - before.iou) +
                  w.density * (before.density - result.metrics.density);
  result.done = next.time_index >= config_.horizon;
  result.obs = Render(next);
  return result;
}

RgbdObs DoughEnv::Render(const DoughState& state) const {
  RgbdObs obs;
  const int res = config_.camera_resolution;
  obs.height = res;
  obs.width = res;
  obs.rgb.resize(res * res * 3);
  obs.depth.resize(res * res);
  const double px = config_.board_size / res;
  const double half = 0.5 * config_.board_size;
  const int n = state.grid_size;
  for (int r = 0; r < res; ++r) {
    const double y = half - (r + 0.5) * px;
    const int row = std::clamp(static_cast<int>((half - y) / state.cell_size), 0, n - 1);
    for (int c = 0; c < res; ++c) {
      const double x = -half + (c + 0.5) * px;
      const int col =
          std::clamp(static_cast<int>((x + half) / state.cell_size), 0, n - 1);
      const double h = state.height(row, col);
      const bool dough = h > config_.mask_threshold;
      std::array<std::uint8_t, 3> color = dough ? kDoughColor : kBoardColor;
      double depth = config_.camera_height - h;
      if (config_.occlusion && UnderPin(state.pin, x, y)) {
        color = kPinColor;
        depth = config_.camera_height - (state.pin.z + state.pin.radius);
      }
      std::copy(color.begin(), color.end(), &obs.rgb[(r * res + c) * 3]);
      obs.depth[r * res + c] = depth;
    }
  }
  return obs;
}

DoughState DoughEnv::GoalState() const {
  DoughState state;
  state.grid_size = goal_.grid_size;
  state.cell_size = goal_.cell_size;
  state.heights = goal_.goal_heights;
  state.pin = StartPin();
  return state;
}

MetricSnapshot DoughEnv::Metrics(const DoughState& state) const {
  return Measure(state, goal_, config_.mask_threshold);
}

}  // namespace dgform
