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

#ifndef DGFORM_PLANNER_LQT_H_
#define DGFORM_PLANNER_LQT_H_

#include <Eigen/Dense>
#include <vector>

#include "dgform/planner/gaussian.h"

namespace dgform {

struct LqtOptions {
  int order = 2;  // integrator chain length; the control is the order-th derivative
  double dt = 1e-3;
  double control_weight = 1e-3;  // R = control_weight * I
  double max_condition = 1e12;
};

// Discrete integrator chain for `dim` independent coordinates. State layout is
// [p, p', ..., p^(order-1)], each block `dim` wide.
struct LinearSystem {
  Eigen::MatrixXd A;
  Eigen::MatrixXd B;
};
LinearSystem IntegratorChain(int dim, int order, double dt);

struct LqtResult {
  int dim = 0;                            // position coordinates
  std::vector<Eigen::VectorXd> states;    // one per reference step
  std::vector<Eigen::VectorXd> controls;  // one fewer than states
  Eigen::MatrixXd Positions() const;      // steps x dim
};

// Minimizes sum_t (p_t - mu_t)^T Sigma_t^-1 (p_t - mu_t) + sum_t u_t^T R u_t
// from the fixed initial state x0 by backward Riccati recursion. ContractError
// on bad options or shapes, NumericalError when a reference covariance or the
// control Hessian has condition number above max_condition.
LqtResult LqtSolve(const std::vector<Gaussian>& reference, const Eigen::VectorXd& x0,
                   const LqtOptions& options);

}  // namespace dgform

#endif  // DGFORM_PLANNER_LQT_H_
