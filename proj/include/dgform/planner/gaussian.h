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

#ifndef DGFORM_PLANNER_GAUSSIAN_H_
#define DGFORM_PLANNER_GAUSSIAN_H_

#include <Eigen/Dense>
#include <cstdint>
#include <span>
#include <vector>

namespace dgform {

struct Gaussian {
  Eigen::VectorXd mean;
  Eigen::MatrixXd cov;

  int dim() const { return static_cast<int>(mean.size()); }
  // LinAlgError unless the covariance is symmetric positive definite and the
  // mean finite.
  void Validate() const;
  double LogPdf(const Eigen::VectorXd& x) const;
};

struct Gmm {
  std::vector<double> weights;
  std::vector<Gaussian> components;

  int size() const { return static_cast<int>(components.size()); }
  int dim() const { return components.empty() ? 0 : components.front().dim(); }
  void Validate() const;
  // mean log density over the samples
  double MeanLogLikelihood(std::span<const Eigen::VectorXd> data) const;
};

// x_task = A x_local + b.
struct TaskFrame {
  Eigen::MatrixXd A;
  Eigen::VectorXd b;

  static TaskFrame Identity(int dim);
};

struct GmmFitOptions {
  int max_iterations = 200;
  double tolerance = 1e-8;       // on the mean log-likelihood
  double regularization = 1e-6;  // added to every covariance diagonal
};

struct GmmFit {
  Gmm gmm;
  // mean log-likelihood after initialization and after every EM iteration
  std::vector<double> log_likelihood;
  bool converged = false;
};

// EM from a seeded k-means++ initialization. ContractError when k < 1,
// k exceeds the sample count, or samples differ in dimension.
GmmFit FitGmmEm(std::span<const Eigen::VectorXd> data, int k, std::uint64_t seed,
                const GmmFitOptions& options = {});

// mean -> A mean + b, cov -> A cov A^T. ContractError on dimension mismatch.
Gaussian FrameTransform(const Gaussian& g, const TaskFrame& frame);

// Per step A^-1 ((left - right) - b). LinAlgError when A is singular.
std::vector<Eigen::VectorXd> RelativeTrajectory(std::span<const Eigen::VectorXd> left,
                                                std::span<const Eigen::VectorXd> right,
                                                const TaskFrame& frame);

// Precision-weighted fusion. LinAlgError on a covariance that is not PD.
Gaussian ProductOfGaussians(std::span<const Gaussian> gaussians);

// Marginal over dims [start, start + count).
Gaussian Marginal(const Gaussian& g, int start, int count);

}  // namespace dgform

#endif  // DGFORM_PLANNER_GAUSSIAN_H_
