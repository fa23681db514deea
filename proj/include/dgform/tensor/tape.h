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

#ifndef DGFORM_TENSOR_TAPE_H_
#define DGFORM_TENSOR_TAPE_H_

#include <functional>
#include <vector>

#include "dgform/tensor/tensor.h"

namespace dgform {

class Tape;

// Handle to a value recorded on a Tape. Cheap to copy; valid while the tape
// lives.
class Var {
 public:
  Var() = default;
  Var(Tape* tape, int id) : tape_(tape), id_(id) {}

  Tape* tape() const { return tape_; }
  int id() const { return id_; }
  bool valid() const { return tape_ != nullptr; }

  const Tensor& value() const;
  int rows() const { return value().rows(); }
  int cols() const { return value().cols(); }

 private:
  Tape* tape_ = nullptr;
  int id_ = -1;
};

// Define-by-run reverse-mode record. Nodes are appended in evaluation order,
// so the node list is already topologically sorted. A tape may be consumed
// by Backward exactly once; a second call throws ContractError.
class Tape {
 public:
  // Local gradient rule: reads the node's output gradient and accumulates
  // into its inputs' gradients through AccumulateGrad.
  using BackwardFn = std::function<void(Tape&, int node)>;

  Tape() = default;
  Tape(const Tape&) = delete;
  Tape& operator=(const Tape&) = delete;

  Var Constant(Tensor value);
  // Leaf bound to a parameter. When the parameter requires grad, Backward
  // accumulates into its grad buffer.
  Var Leaf(Tensor& parameter);

  // Appends an operation result. Gradients flow only when some input needs
  // them.
  Var Record(Tensor value, std::vector<int> inputs, BackwardFn backward);

  void Backward(Var loss);

  const Tensor& value(int id) const { return nodes_[id].value; }
  bool needs_grad(int id) const { return nodes_[id].needs_grad; }
  std::span<const double> grad(int id) const { return nodes_[id].grad; }
  const std::vector<int>& inputs(int id) const { return nodes_[id].inputs; }
  void AccumulateGrad(int id, std::span<const double> delta);
  // mutable gradient buffer of an input node, allocated on demand
  std::span<double> GradBuffer(int id);

  int size() const { return static_cast<int>(nodes_.size()); }
  bool consumed() const { return consumed_; }

 private:
  struct Node {
    Tensor value;
    std::vector<int> inputs;
    BackwardFn backward;
    Tensor* leaf = nullptr;
    bool needs_grad = false;
    std::vector<double> grad;
  };

  std::vector<Node> nodes_;
  bool consumed_ = false;
};

// Differentiable operations. Binary elementwise ops accept equal shapes, a
// 1xn row vector broadcast over rows of the other operand, or a 1x1 scalar.
Var MatMul(Var a, Var b);
Var Add(Var a, Var b);
Var Sub(Var a, Var b);
Var Mul(Var a, Var b);
Var Minimum(Var a, Var b);
Var Scale(Var a, double factor);
Var AddScalar(Var a, double offset);
Var Neg(Var a);
Var Relu(Var a);
Var Tanh(Var a);
Var Exp(Var a);
// throws DomainError when any entry is <= 0
Var Log(Var a);
Var Square(Var a);
// elementwise clamp; gradient is zero where the bound is active
Var Clamp(Var a, double lo, double hi);
// 1x1 reductions
Var Sum(Var a);
Var Mean(Var a);
// column-wise mean over rows: m x n -> 1 x n
Var MeanRows(Var a);
// row-wise sum over columns: m x n -> m x 1
Var SumCols(Var a);
Var ConcatCols(const std::vector<Var>& parts);
Var ConcatRows(const std::vector<Var>& parts);
Var SliceRows(Var a, int start, int count);
Var SliceCols(Var a, int start, int count);
Var Reshape(Var a, int rows, int cols);
// constant sparse matrix times variable
Var SpMM(const SparseMatrix& m, Var x);
// tile a 1xn row vector to rows x n
Var RepeatRows(Var a, int rows);

}  // namespace dgform

#endif  // DGFORM_TENSOR_TAPE_H_
