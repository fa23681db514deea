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

#include "dgform/planner/lqt.h"

#include <cmath>
#include <string>

#include "dgform/common/error.h"

namespace dgform {
namespace {

using Eigen::MatrixXd;
using Eigen::VectorXd;

double Factorial(int n) { return n <= 1 ? 1.0 : n * Factorial(n - 1); }

double Condition(const MatrixXd& symmetric, const char* what) {
  const Eigen::SelfAdjointEigenSolver<MatrixXd> eig(symmetric, Eigen::EigenvaluesOnly);
  const double lo = eig.eigenvalues().minCoeff();
  const double hi = eig.eigenvalues().maxCoeff();
  if (!(lo > 0.0)) throw LinAlgError(std::string(what) + " is not positive definite");
  return hi / lo;
}

}  // namespace

LinearSystem IntegratorChain(int dim, int order, double dt) {
  if (dim < 1 || order < 1 || !(dt > 0.0)) {
    throw ContractError("integrator chain needs dim >= 1, order >= 1, dt > 0");
  }
  const MatrixXd eye = MatrixXd::Identity(dim, dim);
  LinearSystem s{MatrixXd::Zero(dim * order, dim * order), MatrixXd::Zero(dim * order, dim)};
  for (int i = 0; i < order; ++i) {
    for (int j = i; j < order; ++j) {
      s.A.block(i * dim, j * dim, dim, dim) = std::pow(dt, j - i) / Factorial(j - i) * eye;
    }
    s.B.block(i * dim, 0, dim, dim) = std::pow(dt, order - i) / Factorial(order - i) * eye;
  }
  return s;
}

MatrixXd LqtResult::Positions() const {
  MatrixXd out(states.size(), dim);
  for (size_t t = 0; t < states.size(); ++t) out.row(t) = states[t].head(dim).transpose();
  return out;
}

LqtResult LqtSolve(const std::vector<Gaussian>& reference, const VectorXd& x0,
                   const LqtOptions& options) {
  if (reference.empty()) throw ContractError("lqt_solve: empty reference");
  if (options.order < 1) throw ContractError("lqt_solve: order must be >= 1");
  if (!(options.control_weight > 0.0)) throw ContractError("lqt_solve: R must be positive");
  if (!(options.dt > 0.0)) throw ContractError("lqt_solve: dt must be positive");
  const int d = reference[0].dim();
  const int n = d * options.order;
  if (x0.size() != n) {
    throw ContractError("lqt_solve: initial state has " + std::to_string(x0.size()) +
                        " entries, expected " + std::to_string(n));
  }
  const LinearSystem sys = IntegratorChain(d, options.order, options.dt);
  const int steps = static_cast<int>(reference.size());

  // Q_t = Sigma_t^-1 on the position block; C^T Q C and C^T Q mu as n-sized.
  auto precision = [&](int t) {
    const Gaussian& g = reference[t];
    if (g.dim() != d || g.cov.rows() != d || g.cov.cols() != d) {
      throw ContractError("lqt_solve: reference dimensions differ at step " + std::to_string(t));
    }
    if (!g.mean.allFinite() || !g.cov.allFinite()) {
      throw ContractError("lqt_solve: non-finite reference at step " + std::to_string(t));
    }
    if (Condition(g.cov, "lqt_solve: reference covariance") > options.max_condition) {
      throw NumericalError("lqt_solve: reference covariance ill-conditioned at step " +
                           std::to_string(t));
    }
    return MatrixXd(g.cov.ldlt().solve(MatrixXd::Identity(d, d)));
  };

  const MatrixXd r = options.control_weight * MatrixXd::Identity(d, d);
  std::vector<MatrixXd> gains(steps > 1 ? steps - 1 : 0);
  std::vector<VectorXd> feedforward(gains.size());

  MatrixXd q = precision(steps - 1);
  MatrixXd p = MatrixXd::Zero(n, n);
  VectorXd lin = VectorXd::Zero(n);
  p.topLeftCorner(d, d) = q;
  lin.head(d) = q * reference[steps - 1].mean;
  for (int t = steps - 2; t >= 0; --t) {
    const MatrixXd bp = sys.B.transpose() * p;
    MatrixXd m = r + bp * sys.B;
    m = 0.5 * (m + m.transpose());
    if (Condition(m, "lqt_solve: control Hessian") > options.max_condition) {
      throw NumericalError("lqt_solve: control Hessian ill-conditioned at step " +
                           std::to_string(t));
    }
    const Eigen::LLT<MatrixXd> llt(m);
    gains[t] = llt.solve(bp * sys.A);
    feedforward[t] = llt.solve(sys.B.transpose() * lin);
    const MatrixXd closed = sys.A - sys.B * gains[t];
    q = precision(t);
    MatrixXd next = sys.A.transpose() * p * closed;
    next.topLeftCorner(d, d) += q;
    p = 0.5 * (next + next.transpose());
    VectorXd next_lin = closed.transpose() * lin;
    next_lin.head(d) += q * reference[t].mean;
    lin = next_lin;
  }

  LqtResult out;
  out.dim = d;
  out.states.reserve(steps);
  out.controls.reserve(gains.size());
  out.states.push_back(x0);
  for (int t = 0; t + 1 < steps; ++t) {
    const VectorXd u = feedforward[t] - gains[t] * out.states.back();
    out.controls.push_back(u);
    out.states.push_back(sys.A * out.states.back() + sys.B * u);
  }
  return out;
}

}  // namespace dgform
