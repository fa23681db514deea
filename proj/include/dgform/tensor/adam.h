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

#ifndef DGFORM_TENSOR_ADAM_H_
#define DGFORM_TENSOR_ADAM_H_

#include <vector>

#include "dgform/tensor/tensor.h"

namespace dgform {

struct AdamOptions {
  double lr = 3e-4;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

// Moment buffers for a fixed parameter list; the list order must stay stable
// for the optimizer's lifetime.
struct AdamState {
  AdamOptions options;
  long step = 0;
  std::vector<std::vector<double>> first_moment;
  std::vector<std::vector<double>> second_moment;
};

class Adam {
 public:
  Adam(std::vector<Tensor*> params, AdamOptions options = {});

  // Bias-corrected update using the current grads. Every parameter must carry
  // a grad buffer; a missing one throws ContractError and nothing changes.
  void Step();
  void ZeroGrad();

  const AdamState& state() const { return state_; }
  void set_state(AdamState state);
  const std::vector<Tensor*>& params() const { return params_; }
  void set_lr(double lr) { state_.options.lr = lr; }

 private:
  std::vector<Tensor*> params_;
  AdamState state_;
};

}  // namespace dgform

#endif  // DGFORM_TENSOR_ADAM_H_
