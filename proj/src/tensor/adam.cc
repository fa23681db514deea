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

#include "dgform/tensor/adam.h"

#include <cmath>

#include "dgform/common/error.h"

namespace dgform {

Adam::Adam(std::vector<Tensor*> params, AdamOptions options)
    : params_(std::move(params)) {
  state_.options = options;
  for (const Tensor* p : params_) {
    state_.first_moment.emplace_back(p->size(), 0.0);
    state_.second_moment.emplace_back(p->size(), 0.0);
  }
}

void Adam::Step() {
  for (size_t k = 0; k < params_.size(); ++k) {
    if (!params_[k]->has_grad()) {
      throw ContractError("adam step: parameter " + std::to_string(k) +
                          " has no gradient");
    }
  }
  const AdamOptions& o = state_.options;
  ++state_.step;
  const double c1 = 1.0 - std::pow(o.beta1, static_cast<double>(state_.step));
  const double c2 = 1.0 - std::pow(o.beta2, static_cast<double>(state_.step));
  for (size_t k = 0; k < params_.size(); ++k) {
    std::span<double> theta = params_[k]->data();
    std::span<const double> g = params_[k]->grad();
    std::vector<double>& m = state_.first_moment[k];
    std::vector<double>& v = state_.second_moment[k];
    for (size_t i = 0; i < theta.size(); ++i) {
      m[i] = o.beta1 * m[i] + (1.0 - o.beta1) * g[i];
      v[i] = o.beta2 * v[i] + (1.0 - o.beta2) * g[i] * g[i];
      theta[i] -= o.lr * (m[i] / c1) / (std::sqrt(v[i] / c2) + o.eps);
    }
  }
}

void Adam::ZeroGrad() {
  for (Tensor* p : params_) p->ZeroGrad();
}

void Adam::set_state(AdamState state) {
  if (state.first_moment.size() != params_.size() ||
      state.second_moment.size() != params_.size()) {
    throw ShapeError("adam state does not match parameter list");
  }
  for (size_t k = 0; k < params_.size(); ++k) {
    if (state.first_moment[k].size() != static_cast<size_t>(params_[k]->size()) ||
        state.second_moment[k].size() !=
            static_cast<size_t>(params_[k]->size())) {
      throw ShapeError("adam moment buffer shape mismatch");
    }
  }
  state_ = std::move(state);
}

}  // namespace dgform
