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

#include "dgform/planner/gaussian.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "dgform/common/error.h"
#include "dgform/common/rng.h"

namespace dgform {
namespace {

using Eigen::LLT;
using Eigen::MatrixXd;
using Eigen::VectorXd;

LLT<MatrixXd> Cholesky(const MatrixXd& cov, const char* what) {
  LLT<MatrixXd> llt(cov);
  if (llt.info() != Eigen::Success) {
    throw LinAlgError(std::string(what) + ": covariance is not positive definite");
  }
  return llt;
}

double LogDensity(const VectorXd& x, const VectorXd& mean, const LLT<MatrixXd>& llt) {
  const VectorXd z = llt.matrixL().solve(x - mean);
  const MatrixXd& l = llt.matrixLLT();
  double log_det = 0.0;
  for (int i = 0; i < l.rows(); ++i) log_det += 2.0 * std::log(l(i, i));
  return -0.5 * (z.squaredNorm() + log_det + x.size() * std::log(2.0 * std::numbers::pi));
}

double LogSumExp(const std::vector<double>& v) {
  const double m = *std::max_element(v.begin(), v.end());
  if (!std::isfinite(m)) return m;
  double s = 0.0;
  for (double x : v) s += std::exp(x - m);
  return m + std::log(s);
}

MatrixXd SampleCovariance(std::span<const VectorXd> data, const VectorXd& mean) {
  MatrixXd cov = MatrixXd::Zero(mean.size(), mean.size());
  for (const VectorXd& x : data) cov += (x - mean) * (x - mean).transpose();
  return cov / static_cast<double>(data.size());
}

// k-means++ seeding over the samples.
std::vector<VectorXd> SeedCenters(std::span<const VectorXd> data, int k, Rng& rng) {
  std::vector<VectorXd> centers{data[rng.Index(data.size())]};
  std::vector<double> d2(data.size());
  while (static_cast<int>(centers.size()) < k) {
    double total = 0.0;
    for (size_t i = 0; i < data.size(); ++i) {
      d2[i] = std::numeric_limits<double>::infinity();
      for (const VectorXd& c : centers) d2[i] = std::min(d2[i], (data[i] - c).squaredNorm());
      total += d2[i];
    }
    if (total <= 0.0) {
      centers.push_back(data[rng.Index(data.size())]);
      continue;
    }
    double target = rng.Uniform() * total;
    size_t pick = 0;
    for (; pick + 1 < data.size(); ++pick) {
      target -= d2[pick];
      if (target < 0.0) break;
    }
    centers.push_back(data[pick]);
  }
  return centers;
}

}  // namespace

void Gaussian::Validate() const {
  if (cov.rows() != mean.size() || cov.cols() != mean.size()) {
    throw ContractError("gaussian: covariance shape does not match mean");
  }
  if (!mean.allFinite() || !cov.allFinite()) throw LinAlgError("gaussian: non-finite entries");
  if (!cov.isApprox(cov.transpose(), 1e-9)) throw LinAlgError("gaussian: covariance not symmetric");
  Cholesky(cov, "gaussian");
}

double Gaussian::LogPdf(const VectorXd& x) const {
  return LogDensity(x, mean, Cholesky(cov, "gaussian"));
}

void Gmm::Validate() const {
  if (components.empty() || weights.size() != components.size()) {
    throw ContractError("gmm: weights and components must be non-empty and aligned");
  }
  double sum = 0.0;
  for (double w : weights) {
    if (!(w >= 0.0)) throw ContractError("gmm: negative weight");
    sum += w;
  }
  if (std::abs(sum - 1.0) > 1e-9) throw ContractError("gmm: weights do not sum to 1");
  for (const Gaussian& g : components) {
    if (g.dim() != dim()) throw ContractError("gmm: component dimensions differ");
    g.Validate();
  }
}

double Gmm::MeanLogLikelihood(std::span<const VectorXd> data) const {
  std::vector<LLT<MatrixXd>> llts;
  for (const Gaussian& g : components) llts.push_back(Cholesky(g.cov, "gmm"));
  std::vector<double> terms(components.size());
  double total = 0.0;
  for (const VectorXd& x : data) {
    for (size_t k = 0; k < components.size(); ++k) {
      terms[k] = std::log(weights[k]) + LogDensity(x, components[k].mean, llts[k]);
    }
    total += LogSumExp(terms);
  }
  return total / static_cast<double>(data.size());
}

TaskFrame TaskFrame::Identity(int dim) {
  return {MatrixXd::Identity(dim, dim), VectorXd::Zero(dim)};
}

GmmFit FitGmmEm(std::span<const VectorXd> data, int k, std::uint64_t seed,
                const GmmFitOptions& options) {
  if (k < 1) throw ContractError("fit_gmm_em: k must be >= 1");
  if (static_cast<int>(data.size()) < k) {
    throw ContractError("fit_gmm_em: " + std::to_string(data.size()) + " samples for k = " +
                        std::to_string(k));
  }
  const int d = static_cast<int>(data[0].size());
  for (const VectorXd& x : data) {
    if (x.size() != d) throw ContractError("fit_gmm_em: samples differ in dimension");
    if (!x.allFinite()) throw ContractError("fit_gmm_em: non-finite sample");
  }
  const int n = static_cast<int>(data.size());
  const MatrixXd reg = options.regularization * MatrixXd::Identity(d, d);

  VectorXd global_mean = VectorXd::Zero(d);
  for (const VectorXd& x : data) global_mean += x;
  global_mean /= n;
  const MatrixXd global_cov = SampleCovariance(data, global_mean) + reg;

  Rng rng(seed);
  GmmFit fit;
  for (const VectorXd& c : SeedCenters(data, k, rng)) {
    fit.gmm.components.push_back({c, global_cov});
    fit.gmm.weights.push_back(1.0 / k);
  }
  fit.log_likelihood.push_back(fit.gmm.MeanLogLikelihood(data));

  MatrixXd resp(n, k);
  std::vector<double> terms(k);
  for (int iter = 0; iter < options.max_iterations; ++iter) {
    std::vector<LLT<MatrixXd>> llts;
    for (const Gaussian& g : fit.gmm.components) llts.push_back(Cholesky(g.cov, "fit_gmm_em"));
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < k; ++j) {
        terms[j] = std::log(fit.gmm.weights[j]) +
                   LogDensity(data[i], fit.gmm.components[j].mean, llts[j]);
      }
      const double norm = LogSumExp(terms);
      for (int j = 0; j < k; ++j) resp(i, j) = std::exp(terms[j] - norm);
    }
    for (int j = 0; j < k; ++j) {
      const double nk = resp.col(j).sum();
      // a component that lost every sample keeps its parameters with weight 0
      if (nk < 1e-12) {
        fit.gmm.weights[j] = 0.0;
        continue;
      }
      VectorXd mean = VectorXd::Zero(d);
      for (int i = 0; i < n; ++i) mean += resp(i, j) * data[i];
      mean /= nk;
      MatrixXd cov = MatrixXd::Zero(d, d);
      for (int i = 0; i < n; ++i) cov += resp(i, j) * (data[i] - mean) * (data[i] - mean).transpose();
      fit.gmm.components[j] = {mean, cov / nk + reg};
      fit.gmm.weights[j] = nk / n;
    }
    fit.log_likelihood.push_back(fit.gmm.MeanLogLikelihood(data));
    const double change = fit.log_likelihood.back() - fit.log_likelihood[fit.log_likelihood.size() - 2];
    if (std::abs(change) < options.tolerance) {
      fit.converged = true;
      break;
    }
  }
  return fit;
}

Gaussian FrameTransform(const Gaussian& g, const TaskFrame& frame) {
  if (frame.A.cols() != g.dim() || frame.A.rows() != frame.b.size()) {
    throw ContractError("frame_transform: frame does not match the gaussian's dimension");
  }
  return {frame.A * g.mean + frame.b, frame.A * g.cov * frame.A.transpose()};
}

std::vector<VectorXd> RelativeTrajectory(std::span<const VectorXd> left,
                                         std::span<const VectorXd> right,
                                         const TaskFrame& frame) {
  if (left.size() != right.size()) {
    throw ContractError("relative_trajectory: left and right lengths differ");
  }
  const Eigen::FullPivLU<MatrixXd> lu(frame.A);
  if (frame.A.rows() != frame.A.cols() || !lu.isInvertible()) {
    throw LinAlgError("relative_trajectory: frame matrix is singular");
  }
  std::vector<VectorXd> out;
  out.reserve(left.size());
  for (size_t t = 0; t < left.size(); ++t) {
    if (left[t].size() != frame.b.size() || right[t].size() != frame.b.size()) {
      throw ContractError("relative_trajectory: pose dimension does not match the frame");
    }
    out.push_back(lu.solve(left[t] - right[t] - frame.b));
  }
  return out;
}

Gaussian ProductOfGaussians(std::span<const Gaussian> gaussians) {
  if (gaussians.empty()) throw ContractError("product_of_gaussians: no inputs");
  if (gaussians.size() == 1) {
    Cholesky(gaussians[0].cov, "product_of_gaussians");
    return gaussians[0];
  }
  const int d = gaussians[0].dim();
  MatrixXd precision = MatrixXd::Zero(d, d);
  VectorXd weighted = VectorXd::Zero(d);
  for (const Gaussian& g : gaussians) {
    if (g.dim() != d) throw ContractError("product_of_gaussians: dimensions differ");
    const LLT<MatrixXd> llt = Cholesky(g.cov, "product_of_gaussians");
    const MatrixXd p = llt.solve(MatrixXd::Identity(d, d));
    precision += p;
    weighted += p * g.mean;
  }
  const LLT<MatrixXd> llt = Cholesky(precision, "product_of_gaussians");
  MatrixXd cov = llt.solve(MatrixXd::Identity(d, d));
  cov = 0.5 * (cov + cov.transpose());
  return {llt.solve(weighted), cov};
}

Gaussian Marginal(const Gaussian& g, int start, int count) {
  if (start < 0 || count < 1 || start + count > g.dim()) {
    throw ContractError("marginal: range outside the gaussian");
  }
  return {g.mean.segment(start, count), g.cov.block(start, start, count, count)};
}

}  // namespace dgform
