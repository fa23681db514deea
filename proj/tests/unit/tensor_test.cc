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
#include <functional>
#include <numbers>

#include "dgform/common/error.h"
#include "dgform/tensor/adam.h"
#include "dgform/tensor/tape.h"
#include "dgform/tensor/tensor.h"
#include "support/gradcheck.h"

namespace dgform {
namespace {

using testing::CheckGradients;
using testing::RandomTensor;

void ExpectTensorNear(const Tensor& a, const Tensor& b, double tol) {
  ASSERT_TRUE(a.SameShape(b)) << a.ShapeString() << " vs " << b.ShapeString();
  for (int i = 0; i < a.size(); ++i) EXPECT_NEAR(a[i], b[i], tol) << i;
}

TEST(MatMul, IdentityZeroAndArithmetic) {
  const Tensor a = Tensor::FromRows({{1, 2}, {3, 4}});
  const Tensor b = Tensor::FromRows({{5, 6}, {7, 8}});
  ExpectTensorNear(MatMulValue(Tensor::Identity(2), a), a, 0.0);
  ExpectTensorNear(MatMulValue(Tensor(2, 2), a), Tensor(2, 2), 0.0);
  ExpectTensorNear(MatMulValue(a, b), Tensor::FromRows({{19, 22}, {43, 50}}),
                   0.0);
}

TEST(MatMul, DimensionMismatchThrows) {
  EXPECT_THROW(MatMulValue(Tensor(2, 3), Tensor(2, 3)), ShapeError);
  Tape tape;
  EXPECT_THROW(MatMul(tape.Constant(Tensor(1, 2)), tape.Constant(Tensor(3, 1))),
               ShapeError);
}

TEST(MatMul, AssociativeOnRandomChains) {
  for (unsigned seed = 0; seed < 20; ++seed) {
    const int m = 1 + seed % 8, k = 1 + (seed * 3) % 8, n = 1 + (seed * 5) % 8,
              p = 1 + (seed * 7) % 8;
    const Tensor a = RandomTensor(m, k, seed);
    const Tensor b = RandomTensor(k, n, seed + 100);
    const Tensor c = RandomTensor(n, p, seed + 200);
    ExpectTensorNear(MatMulValue(MatMulValue(a, b), c),
                     MatMulValue(a, MatMulValue(b, c)), 1e-10);
  }
}

TEST(Elementwise, ScalarExamples) {
  Tape tape;
  EXPECT_EQ(Relu(tape.Constant(Tensor::Scalar(-1.5))).value().item(), 0.0);
  EXPECT_EQ(Tanh(tape.Constant(Tensor::Scalar(0.0))).value().item(), 0.0);
  EXPECT_NEAR(Exp(tape.Constant(Tensor::Scalar(1.0))).value().item(),
              std::numbers::e, 1e-15);
  EXPECT_NEAR(Log(tape.Constant(Tensor::Scalar(std::numbers::e))).value().item(),
              1.0, 1e-15);
}

TEST(Elementwise, LogOfNonPositiveIsDomainError) {
  Tape tape;
  EXPECT_THROW(Log(tape.Constant(Tensor::Scalar(0.0))), DomainError);
  EXPECT_THROW(Log(tape.Constant(Tensor::FromRows({{1.0, -2.0}}))),
               DomainError);
}

TEST(Elementwise, BroadcastRules) {
  Tape tape;
  Var m = tape.Constant(Tensor::FromRows({{1, 2}, {3, 4}}));
  Var row = tape.Constant(Tensor::FromRows({{10, 20}}));
  Var s = tape.Constant(Tensor::Scalar(2.0));
  ExpectTensorNear(Add(m, row).value(), Tensor::FromRows({{11, 22}, {13, 24}}),
                   0.0);
  ExpectTensorNear(Mul(s, m).value(), Tensor::FromRows({{2, 4}, {6, 8}}), 0.0);
  EXPECT_THROW(Add(m, tape.Constant(Tensor(3, 1))), ShapeError);
}

TEST(Backward, SumGivesOnes) {
  Tensor x = RandomTensor(3, 4, 1);
  x.set_requires_grad(true);
  Tape tape;
  tape.Backward(Sum(tape.Leaf(x)));
  for (double g : x.grad()) EXPECT_EQ(g, 1.0);
}

TEST(Backward, HalfSquaredNormGivesX) {
  Tensor x = RandomTensor(5, 2, 2);
  x.set_requires_grad(true);
  Tape tape;
  tape.Backward(Scale(Sum(Square(tape.Leaf(x))), 0.5));
  for (int i = 0; i < x.size(); ++i) EXPECT_NEAR(x.grad()[i], x[i], 1e-15);
}

TEST(Backward, NonScalarLossIsContractError) {
  Tensor x(2, 2, 1.0);
  x.set_requires_grad(true);
  Tape tape;
  EXPECT_THROW(tape.Backward(tape.Leaf(x)), ContractError);
}

TEST(Backward, SecondCallOnSameTapeThrows) {
  Tensor x(2, 2, 1.0);
  x.set_requires_grad(true);
  Tape tape;
  Var loss = Sum(tape.Leaf(x));
  tape.Backward(loss);
  EXPECT_THROW(tape.Backward(loss), ContractError);
  // grads were not accumulated twice
  for (double g : x.grad()) EXPECT_EQ(g, 1.0);
}

TEST(Backward, ConstantsReceiveNoGrad) {
  Tensor w(2, 2, 1.0);  // requires_grad false
  Tape tape;
  tape.Backward(Sum(tape.Leaf(w)));
  EXPECT_FALSE(w.has_grad());
}

// Random two-layer MLP: loss = sum(tanh(x W1 + b1) W2 + b2)^2.
TEST(Backward, TwoLayerMlpMatchesFiniteDifferences) {
  Tensor x = RandomTensor(4, 5, 10);
  Tensor w1 = RandomTensor(5, 6, 11), b1 = RandomTensor(1, 6, 12);
  Tensor w2 = RandomTensor(6, 3, 13), b2 = RandomTensor(1, 3, 14);
  std::vector<std::pair<std::string, Tensor*>> params = {
      {"w1", &w1}, {"b1", &b1}, {"w2", &w2}, {"b2", &b2}, {"x", &x}};
  auto build = [&](Tape& tape) {
    Var h = Tanh(Add(MatMul(tape.Leaf(x), tape.Leaf(w1)), tape.Leaf(b1)));
    Var y = Add(MatMul(h, tape.Leaf(w2)), tape.Leaf(b2));
    return Sum(Square(y));
  };
  for (auto& [name, p] : params) {
    p->set_requires_grad(true);
    p->ZeroGrad();
  }
  Tape tape;
  tape.Backward(build(tape));
  std::vector<std::vector<double>> analytic;
  for (auto& [name, p] : params) {
    analytic.emplace_back(p->grad().begin(), p->grad().end());
  }
  const auto result = CheckGradients(params, analytic, [&] {
    Tape t;
    return build(t).value().item();
  });
  EXPECT_LT(result.max_rel_error, 1e-4) << result.worst;
  EXPECT_GT(result.checked, 60);
}

// Property: every differentiable op agrees with central differences on random
// shapes up to 8x8.
TEST(Backward, EveryOpMatchesFiniteDifferences) {
  using Builder = std::function<Var(Tape&, Tensor&, Tensor&)>;
  struct Case {
    const char* name;
    Builder build;
    bool positive = false;  // inputs drawn in (0.5, 2)
    bool square_b = false;  // b has the shape of a^T (for matmul)
  };
  const SparseMatrix sparse(3, 0, {});
  const std::vector<Case> cases = {
      {"matmul",
       [](Tape& t, Tensor& a, Tensor& b) {
         return MatMul(t.Leaf(a), t.Leaf(b));
       },
       false, true},
      {"add", [](Tape& t, Tensor& a, Tensor& b) { return Add(t.Leaf(a), t.Leaf(b)); }},
      {"sub", [](Tape& t, Tensor& a, Tensor& b) { return Sub(t.Leaf(a), t.Leaf(b)); }},
      {"mul", [](Tape& t, Tensor& a, Tensor& b) { return Mul(t.Leaf(a), t.Leaf(b)); }},
      {"minimum",
       [](Tape& t, Tensor& a, Tensor& b) { return Minimum(t.Leaf(a), t.Leaf(b)); }},
      {"tanh", [](Tape& t, Tensor& a, Tensor&) { return Tanh(t.Leaf(a)); }},
      {"exp", [](Tape& t, Tensor& a, Tensor&) { return Exp(t.Leaf(a)); }},
      {"log", [](Tape& t, Tensor& a, Tensor&) { return Log(t.Leaf(a)); }, true},
      {"relu", [](Tape& t, Tensor& a, Tensor&) { return Relu(t.Leaf(a)); }},
      {"clamp",
       [](Tape& t, Tensor& a, Tensor&) { return Clamp(t.Leaf(a), -0.5, 0.5); }},
      {"mean_rows", [](Tape& t, Tensor& a, Tensor&) { return MeanRows(t.Leaf(a)); }},
      {"sum_cols", [](Tape& t, Tensor& a, Tensor&) { return SumCols(t.Leaf(a)); }},
      {"concat",
       [](Tape& t, Tensor& a, Tensor& b) {
         return ConcatCols({t.Leaf(a), t.Leaf(b)});
       }},
      {"concat_rows",
       [](Tape& t, Tensor& a, Tensor& b) {
         return ConcatRows({t.Leaf(a), t.Leaf(b)});
       }},
      {"slice",
       [](Tape& t, Tensor& a, Tensor&) {
         return SliceCols(SliceRows(t.Leaf(a), 0, a.rows()), 0,
                          (a.cols() + 1) / 2);
       }},
      {"reshape",
       [](Tape& t, Tensor& a, Tensor&) { return Reshape(t.Leaf(a), 1, a.size()); }},
  };
  for (const Case& c : cases) {
    for (unsigned seed = 0; seed < 12; ++seed) {
      const int rows = 1 + (seed * 5 + 1) % 8;
      const int cols = 1 + (seed * 3 + 2) % 8;
      const double lo = c.positive ? 0.5 : -1.0, hi = c.positive ? 2.0 : 1.0;
      Tensor a = RandomTensor(rows, cols, seed * 7 + 1, lo, hi);
      Tensor b = c.square_b ? RandomTensor(cols, rows, seed * 7 + 2)
                            : RandomTensor(rows, cols, seed * 7 + 2, lo, hi);
      // keep relu/clamp/minimum away from kinks so differences are valid
      for (int i = 0; i < a.size(); ++i) {
        if (std::abs(a[i]) < 0.05) a[i] += 0.1;
        if (std::abs(std::abs(a[i]) - 0.5) < 0.02) a[i] *= 1.1;
        if (!c.square_b && std::abs(a[i] - b[i]) < 0.05) b[i] += 0.2;
      }
      const Tensor weights = RandomTensor(64, 64, seed + 999);
      auto loss_of = [&](Tape& t) {
        Var y = c.build(t, a, b);
        // weight outputs so every coordinate contributes a distinct gradient
        Var w = t.Constant(Tensor(
            y.rows(), y.cols(),
            std::vector<double>(weights.data().begin(),
                                weights.data().begin() + y.value().size())));
        return Sum(Mul(y, w));
      };
      a.set_requires_grad(true);
      b.set_requires_grad(true);
      a.ZeroGrad();
      b.ZeroGrad();
      Tape tape;
      tape.Backward(loss_of(tape));
      std::vector<std::pair<std::string, Tensor*>> params = {{"a", &a},
                                                             {"b", &b}};
      std::vector<std::vector<double>> analytic = {
          {a.grad().begin(), a.grad().end()}, {b.grad().begin(), b.grad().end()}};
      const auto result = CheckGradients(params, analytic, [&] {
        Tape t;
        return loss_of(t).value().item();
      });
      EXPECT_LT(result.max_rel_error, 1e-4)
          << c.name << " seed " << seed << " at " << result.worst;
    }
  }
}

TEST(Backward, SparseMultiplyAndRepeatMatchFiniteDifferences) {
  const SparseMatrix m(3, 4,
                       {{0, 1, 0.5}, {0, 3, 0.5}, {1, 0, 1.0}, {2, 2, -2.0},
                        {2, 2, 1.0}});
  Tensor x = RandomTensor(4, 3, 5);
  Tensor r = RandomTensor(1, 3, 6);
  x.set_requires_grad(true);
  r.set_requires_grad(true);
  const Tensor w = RandomTensor(3, 3, 7);
  auto loss_of = [&](Tape& t) {
    Var y = Add(SpMM(m, t.Leaf(x)), RepeatRows(t.Leaf(r), 3));
    return Sum(Mul(Square(y), t.Constant(w)));
  };
  x.ZeroGrad();
  r.ZeroGrad();
  Tape tape;
  tape.Backward(loss_of(tape));
  std::vector<std::pair<std::string, Tensor*>> params = {{"x", &x}, {"r", &r}};
  std::vector<std::vector<double>> analytic = {
      {x.grad().begin(), x.grad().end()}, {r.grad().begin(), r.grad().end()}};
  const auto result = CheckGradients(params, analytic, [&] {
    Tape t;
    return loss_of(t).value().item();
  });
  EXPECT_LT(result.max_rel_error, 1e-4) << result.worst;
  // duplicates (2,2) were summed
  const Tensor y = m.Multiply(Tensor::Identity(4));
  EXPECT_DOUBLE_EQ(y(2, 2), -1.0);
}

TEST(Adam, FirstStepMovesByLearningRateTimesSign) {
  Tensor p = Tensor::FromRows({{1.0, -2.0, 0.5}});
  p.set_requires_grad(true);
  Adam adam({&p}, AdamOptions{});
  std::span<double> g = p.MutableGrad();
  g[0] = 3.0;
  g[1] = -0.01;
  g[2] = 1e3;
  adam.Step();
  const double lr = 3e-4;
  EXPECT_NEAR(p[0], 1.0 - lr, 1e-10);
  EXPECT_NEAR(p[1], -2.0 + lr, 1e-9);
  EXPECT_NEAR(p[2], 0.5 - lr, 1e-10);
  EXPECT_EQ(adam.state().step, 1);
}

TEST(Adam, ZeroGradLeavesParamsAndDecaysMoments) {
  Tensor p = Tensor::FromRows({{1.0, 2.0}});
  p.set_requires_grad(true);
  Adam adam({&p});
  p.MutableGrad()[0] = 1.0;
  adam.Step();
  const double m_before = adam.state().first_moment[0][0];
  const double v_before = adam.state().second_moment[0][0];
  const Tensor before = p;
  p.ZeroGrad();
  adam.Step();
  // zero gradient: the update is driven only by the decaying moment
  EXPECT_NEAR(adam.state().first_moment[0][0], 0.9 * m_before, 1e-15);
  EXPECT_NEAR(adam.state().second_moment[0][0], 0.999 * v_before, 1e-15);
  EXPECT_EQ(p[1], before[1]);
}

TEST(Adam, StrictlyZeroGradientFromStartLeavesParams) {
  Tensor p = Tensor::FromRows({{1.0, 2.0}});
  p.set_requires_grad(true);
  Adam adam({&p});
  p.ZeroGrad();
  adam.Step();
  EXPECT_EQ(p[0], 1.0);
  EXPECT_EQ(p[1], 2.0);
}

TEST(Adam, TwoStepsMatchHandUnrolledRecursion) {
  const double lr = 0.1, b1 = 0.8, b2 = 0.9, eps = 1e-6, g = 0.7, theta0 = 2.0;
  Tensor p = Tensor::Scalar(theta0);
  p.set_requires_grad(true);
  Adam adam({&p}, AdamOptions{lr, b1, b2, eps});
  for (int i = 0; i < 2; ++i) {
    p.MutableGrad()[0] = g;
    adam.Step();
  }
  // hand-unrolled
  double m = (1 - b1) * g, v = (1 - b2) * g * g;
  double theta = theta0 - lr * (m / (1 - b1)) / (std::sqrt(v / (1 - b2)) + eps);
  m = b1 * m + (1 - b1) * g;
  v = b2 * v + (1 - b2) * g * g;
  theta -= lr * (m / (1 - b1 * b1)) / (std::sqrt(v / (1 - b2 * b2)) + eps);
  EXPECT_NEAR(p.item(), theta, 1e-14);
}

TEST(Adam, MissingGradIsContractError) {
  Tensor a = Tensor::Scalar(1.0), b = Tensor::Scalar(2.0);
  Adam adam({&a, &b});
  a.MutableGrad()[0] = 1.0;
  EXPECT_THROW(adam.Step(), ContractError);
  EXPECT_EQ(a.item(), 1.0);
  EXPECT_EQ(adam.state().step, 0);
}

}  // namespace
}  // namespace dgform
