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

#include <cmath>
#include <limits>

#include "dgform/common/error.h"
#include "dgform/common/rng.h"
#include "dgform/eval/metrics.h"

namespace dgform {
namespace {

GridMask RandomMask(int n, double density, std::uint64_t seed) {
  Rng rng(seed);
  GridMask m(n, n);
  for (auto& c : m.cells) c = rng.Uniform() < density;
  return m;
}

DoughState StateFromMask(const GridMask& mask, double height, double cell) {
  DoughState s;
  s.grid_size = mask.rows;
  s.cell_size = cell;
  s.heights.assign(mask.cells.size(), 0.0);
  for (size_t i = 0; i < mask.cells.size(); ++i) {
    if (mask.cells[i]) s.heights[i] = height;
  }
  return s;
}

GoalSpec GoalFromMask(const GridMask& mask, double height, double cell) {
  GoalSpec g;
  g.grid_size = mask.rows;
  g.cell_size = cell;
  g.goal_mask = mask.cells;
  g.goal_heights.assign(mask.cells.size(), 0.0);
  for (size_t i = 0; i < mask.cells.size(); ++i) {
    if (mask.cells[i]) g.goal_heights[i] = height;
  }
  return g;
}

TEST(Iou, Examples) {
  GridMask a(8, 8), b(8, 8), half(8, 8);
  for (int r = 0; r < 4; ++r) {
    for (int c = 0; c < 8; ++c) a.set(r, c);
  }
  for (int r = 4; r < 8; ++r) {
    for (int c = 0; c < 8; ++c) b.set(r, c);
  }
  for (int r = 0; r < 2; ++r) {
    for (int c = 0; c < 8; ++c) half.set(r, c);
  }
  EXPECT_DOUBLE_EQ(Iou(a, a), 1.0);
  EXPECT_DOUBLE_EQ(Iou(a, b), 0.0);
  EXPECT_DOUBLE_EQ(Iou(half, a), 0.5);
  EXPECT_DOUBLE_EQ(Iou(GridMask(8, 8), GridMask(8, 8)), 1.0);
  EXPECT_THROW(Iou(GridMask(8, 8), GridMask(4, 4)), ContractError);
}

TEST(Iou, SymmetricOnRandomMasks) {
  for (std::uint64_t s = 0; s < 20; ++s) {
    const GridMask a = RandomMask(16, 0.4, s), b = RandomMask(16, 0.6, s + 99);
    EXPECT_EQ(Iou(a, b), Iou(b, a));
  }
}

TEST(Sdf, ZeroWhenCurrentInsideGoal) {
  GridMask goal(16, 16), cur(16, 16);
  for (int r = 2; r < 12; ++r) {
    for (int c = 2; c < 12; ++c) goal.set(r, c);
  }
  for (int r = 4; r < 8; ++r) {
    for (int c = 4; c < 8; ++c) cur.set(r, c);
  }
  const auto res = SdfDistance(StateFromMask(cur, 0.01, 0.1),
                               GoalFromMask(goal, 0.01, 0.1), 1e-3);
  EXPECT_EQ(res.value, 0.0);
  EXPECT_FALSE(res.empty_current);
  // goal-shaped state
  EXPECT_EQ(SdfDistance(StateFromMask(goal, 0.01, 0.1),
                        GoalFromMask(goal, 0.01, 0.1), 1e-3)
                .value,
            0.0);
}

TEST(Sdf, SingleCellAtKnownDistance) {
  GridMask goal(32, 32), cur(32, 32);
  for (int r = 0; r < 32; ++r) {
    for (int c = 0; c < 10; ++c) goal.set(r, c);
  }
  cur.set(5, 17);  // 8 cells right of the last goal column
  const double cell = 0.00625;
  const auto res = SdfDistance(StateFromMask(cur, 0.01, cell),
                               GoalFromMask(goal, 0.01, cell), 1e-3);
  EXPECT_NEAR(res.value, 8 * cell, 1e-15);
}

TEST(Sdf, EmptyCurrentIsFlaggedZero) {
  GridMask goal(8, 8);
  goal.set(3, 3);
  const auto res = SdfDistance(StateFromMask(GridMask(8, 8), 0.0, 0.1),
                               GoalFromMask(goal, 0.01, 0.1), 1e-3);
  EXPECT_TRUE(res.empty_current);
  EXPECT_EQ(res.value, 0.0);
}

// O(n^2) nearest-goal-cell scan.
TEST(Sdf, MatchesBruteForceNearestCell) {
  for (std::uint64_t s = 0; s < 10; ++s) {
    const int n = 24;
    const GridMask goal = RandomMask(n, 0.05 + 0.02 * s, s);
    const GridMask cur = RandomMask(n, 0.3, s + 1000);
    if (goal.Count() == 0 || cur.Count() == 0) continue;
    double total = 0.0;
    for (int r = 0; r < n; ++r) {
      for (int c = 0; c < n; ++c) {
        if (!cur.at(r, c)) continue;
        double best = std::numeric_limits<double>::infinity();
        for (int gr = 0; gr < n; ++gr) {
          for (int gc = 0; gc < n; ++gc) {
            if (goal.at(gr, gc)) best = std::min(best, std::hypot(gr - r, gc - c));
          }
        }
        total += best;
      }
    }
    const double expected = total / cur.Count() * 0.01;
    const auto res = SdfDistance(StateFromMask(cur, 1.0, 0.01),
                                 GoalFromMask(goal, 1.0, 0.01), 0.5);
    EXPECT_NEAR(res.value, expected, 1e-12) << "seed " << s;
  }
}

TEST(Density, Examples) {
  GridMask goal(8, 8);
  for (int r = 0; r < 4; ++r) {
    for (int c = 0; c < 4; ++c) goal.set(r, c);
  }
  const GoalSpec g = GoalFromMask(goal, 0.02, 0.1);
  DoughState s = StateFromMask(goal, 0.02, 0.1);
  EXPECT_EQ(DensityMetric(s, g), 0.0);
  const double delta = 0.003;
  for (int i = 0; i < 5; ++i) s.heights[i * 3] += delta;
  EXPECT_NEAR(DensityMetric(s, g), 5 * delta * 0.01, 1e-15);
}

TEST(Density, MatchesScalarLoopAndTriangleInequality) {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    Rng rng(seed);
    DoughState a, b, c;
    for (DoughState* s : {&a, &b, &c}) {
      s->grid_size = 12;
      s->cell_size = 0.02;
      s->heights.resize(144);
      for (double& h : s->heights) h = rng.Uniform(0.0, 0.05);
    }
    double loop = 0.0;
    for (int i = 0; i < 144; ++i) loop += std::abs(a.heights[i] - b.heights[i]);
    EXPECT_NEAR(DensityMetric(a, b), loop * 0.02 * 0.02, 1e-15);
    EXPECT_LE(DensityMetric(a, c), DensityMetric(a, b) + DensityMetric(b, c) + 1e-15);
  }
}

}  // namespace
}  // namespace dgform
