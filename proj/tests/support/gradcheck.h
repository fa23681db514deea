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

#ifndef DGFORM_TESTS_SUPPORT_GRADCHECK_H_
#define DGFORM_TESTS_SUPPORT_GRADCHECK_H_

// Central finite-difference oracle for gradient tests. Works on raw parameter
// storage only, so it stays independent of the tape under test.

#include <algorithm>
#include <cmath>
#include <functional>
#include <string>
#include <vector>

#include "dgform/tensor/tensor.h"

namespace dgform::testing {

struct GradCheckResult {
  double max_rel_error = 0.0;
  double max_abs_error = 0.0;
  std::string worst;  // "param[index]" of the worst coordinate
  int checked = 0;
};

// Relative error with an absolute floor for coordinates whose gradient is
// essentially zero.
inline double RelError(double analytic, double numeric) {
  const double diff = std::abs(analytic - numeric);
  if (diff < 1e-9) return 0.0;
  return diff / std::max({std::abs(analytic), std::abs(numeric), 1e-12});
}

// loss(): forward evaluation reading the current parameter values.
// analytic: gradients already computed for each parameter (same layout).
inline GradCheckResult CheckGradients(
    const std::vector<std::pair<std::string, Tensor*>>& params,
    const std::vector<std::vector<double>>& analytic,
    const std::function<double()>& loss, double step = 1e-5,
    int max_coords_per_param = 1 << 30) {
  GradCheckResult result;
  for (size_t k = 0; k < params.size(); ++k) {
    Tensor& p = *params[k].second;
    const int n = p.size();
    const int stride = std::max(1, n / std::max(1, max_coords_per_param));
    for (int i = 0; i < n; i += stride) {
      const double saved = p[i];
      p[i] = saved + step;
      const double up = loss();
      p[i] = saved - step;
      const double down = loss();
      p[i] = saved;
      const double numeric = (up - down) / (2.0 * step);
      const double rel = RelError(analytic[k][i], numeric);
      const double abs_err = std::abs(analytic[k][i] - numeric);
      ++result.checked;
      result.max_abs_error = std::max(result.max_abs_error, abs_err);
      if (rel > result.max_rel_error) {
        result.max_rel_error = rel;
        result.worst = params[k].first + "[" + std::to_string(i) + "]";
      }
    }
  }
  return result;
}

inline Tensor RandomTensor(int rows, int cols, unsigned seed, double lo = -1.0,
                           double hi = 1.0) {
  // small LCG keeps this oracle free of library RNG code
  Tensor t(rows, cols);
  unsigned long long state = 0x853c49e6748fea9bULL ^ (seed * 0x9E3779B97F4A7C15ULL);
  for (int i = 0; i < t.size(); ++i) {
    state = state * 6364136223846793005ULL + 1442695040888963407ULL;
    const double u = static_cast<double>(state >> 11) * 0x1.0p-53;
    t[i] = lo + (hi - lo) * u;
  }
  return t;
}

}  // namespace dgform::testing

#endif  // DGFORM_TESTS_SUPPORT_GRADCHECK_H_
