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

#ifndef DGFORM_TENSOR_TENSOR_H_
#define DGFORM_TENSOR_TENSOR_H_

#include <initializer_list>
#include <span>
#include <string>
#include <vector>

namespace dgform {

// Dense row-major 2-D array of doubles. Scalars are 1x1 and row vectors 1xn.
// grad is empty until a backward pass or the optimizer allocates it.
class Tensor {
 public:
  Tensor() = default;
  Tensor(int rows, int cols, double fill = 0.0);
  Tensor(int rows, int cols, std::vector<double> data);

  static Tensor Scalar(double value) { return Tensor(1, 1, value); }
  static Tensor FromRows(std::initializer_list<std::initializer_list<double>>);
  static Tensor RowVector(std::span<const double> values);
  static Tensor Identity(int n);

  int rows() const { return rows_; }
  int cols() const { return cols_; }
  int size() const { return rows_ * cols_; }
  bool SameShape(const Tensor& other) const {
    return rows_ == other.rows_ && cols_ == other.cols_;
  }
  std::string ShapeString() const;

  double& operator()(int r, int c) { return data_[r * cols_ + c]; }
  double operator()(int r, int c) const { return data_[r * cols_ + c]; }
  double& operator[](int i) { return data_[i]; }
  double operator[](int i) const { return data_[i]; }
  // value of a 1x1 tensor
  double item() const;

  std::span<double> data() { return data_; }
  std::span<const double> data() const { return data_; }
  std::vector<double>& storage() { return data_; }
  const std::vector<double>& storage() const { return data_; }

  bool requires_grad() const { return requires_grad_; }
  void set_requires_grad(bool flag) { requires_grad_ = flag; }

  bool has_grad() const { return !grad_.empty(); }
  std::span<double> grad() { return grad_; }
  std::span<const double> grad() const { return grad_; }
  // allocates a zeroed gradient buffer if absent
  std::span<double> MutableGrad();
  void ZeroGrad();
  void ClearGrad() { grad_.clear(); }

  bool AllFinite() const;

 private:
  int rows_ = 0;
  int cols_ = 0;
  std::vector<double> data_;
  bool requires_grad_ = false;
  std::vector<double> grad_;
};

// Constant sparse matrix in CSR form, used for graph aggregation and row
// selection. Never differentiated itself.
class SparseMatrix {
 public:
  struct Entry {
    int row;
    int col;
    double value;
  };

  SparseMatrix() = default;
  // entries may come in any order; duplicates are summed
  SparseMatrix(int rows, int cols, std::vector<Entry> entries);

  int rows() const { return rows_; }
  int cols() const { return cols_; }
  int nonzeros() const { return static_cast<int>(values_.size()); }

  // y = this * x
  Tensor Multiply(const Tensor& x) const;
  // y = this^T * x, accumulated into out (shape cols x x.cols())
  void MultiplyTransposeAccumulate(std::span<const double> x, int x_cols,
                                   std::span<double> out) const;

 private:
  int rows_ = 0;
  int cols_ = 0;
  std::vector<int> row_start_;
  std::vector<int> col_index_;
  std::vector<double> values_;
};

// Dense product without gradient tracking.
Tensor MatMulValue(const Tensor& a, const Tensor& b);

}  // namespace dgform

#endif  // DGFORM_TENSOR_TENSOR_H_
