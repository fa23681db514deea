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

#include "dgform/tensor/tensor.h"

#include <Eigen/Core>
#include <algorithm>
#include <cmath>

#include "dgform/common/error.h"

namespace dgform {
namespace {

using RowMajor =
    Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

}  // namespace

Tensor::Tensor(int rows, int cols, double fill)
    : rows_(rows), cols_(cols) {
  if (rows < 0 || cols < 0) throw ShapeError("negative tensor dimension");
  data_.assign(static_cast<size_t>(rows) * cols, fill);
}

Tensor::Tensor(int rows, int cols, std::vector<double> data)
    : rows_(rows), cols_(cols), data_(std::move(data)) {
  if (rows < 0 || cols < 0) throw ShapeError("negative tensor dimension");
  if (data_.size() != static_cast<size_t>(rows) * cols) {
    throw ShapeError("tensor data length " + std::to_string(data_.size()) +
                     " does not match shape " + ShapeString());
  }
}

Tensor Tensor::FromRows(
    std::initializer_list<std::initializer_list<double>> rows) {
  const int r = static_cast<int>(rows.size());
  const int c = r == 0 ? 0 : static_cast<int>(rows.begin()->size());
  std::vector<double> data;
  data.reserve(static_cast<size_t>(r) * c);
  for (const auto& row : rows) {
    if (static_cast<int>(row.size()) != c) throw ShapeError("ragged rows");
    data.insert(data.end(), row.begin(), row.end());
  }
  return Tensor(r, c, std::move(data));
}

Tensor Tensor::RowVector(std::span<const double> values) {
  return Tensor(1, static_cast<int>(values.size()),
                std::vector<double>(values.begin(), values.end()));
}

Tensor Tensor::Identity(int n) {
  Tensor t(n, n);
  for (int i = 0; i < n; ++i) t(i, i) = 1.0;
  return t;
}

std::string Tensor::ShapeString() const {
  return "[" + std::to_string(rows_) + "x" + std::to_string(cols_) + "]";
}

double Tensor::item() const {
  if (size() != 1) {
    throw ShapeError("item() on non-scalar tensor " + ShapeString());
  }
  return data_[0];
}

std::span<double> Tensor::MutableGrad() {
  if (grad_.size() != data_.size()) grad_.assign(data_.size(), 0.0);
  return grad_;
}

void Tensor::ZeroGrad() { grad_.assign(data_.size(), 0.0); }

bool Tensor::AllFinite() const {
  return std::all_of(data_.begin(), data_.end(),
                     [](double v) { return std::isfinite(v); });
}

SparseMatrix::SparseMatrix(int rows, int cols, std::vector<Entry> entries)
    : rows_(rows), cols_(cols) {
  std::sort(entries.begin(), entries.end(), [](const Entry& a, const Entry& b) {
    return a.row != b.row ? a.row < b.row : a.col < b.col;
  });
  row_start_.assign(rows + 1, 0);
  int prev_row = -1;
  int prev_col = -1;
  for (const Entry& e : entries) {
    if (e.row < 0 || e.row >= rows || e.col < 0 || e.col >= cols) {
      throw ShapeError("sparse entry out of range");
    }
    if (e.row == prev_row && e.col == prev_col) {
      values_.back() += e.value;
      continue;
    }
    col_index_.push_back(e.col);
    values_.push_back(e.value);
    ++row_start_[e.row + 1];
    prev_row = e.row;
    prev_col = e.col;
  }
  for (int r = 0; r < rows; ++r) row_start_[r + 1] += row_start_[r];
}

Tensor SparseMatrix::Multiply(const Tensor& x) const {
  if (x.rows() != cols_) {
    throw ShapeError("sparse multiply: " + std::to_string(rows_) + "x" +
                     std::to_string(cols_) + " by " + x.ShapeString());
  }
  const int n = x.cols();
  Tensor y(rows_, n);
  for (int r = 0; r < rows_; ++r) {
    double* out = &y(r, 0);
    for (int k = row_start_[r]; k < row_start_[r + 1]; ++k) {
      const double v = values_[k];
      const double* in = &x.data()[static_cast<size_t>(col_index_[k]) * n];
      for (int c = 0; c < n; ++c) out[c] += v * in[c];
    }
  }
  return y;
}

void SparseMatrix::MultiplyTransposeAccumulate(std::span<const double> x,
                                               int x_cols,
                                               std::span<double> out) const {
  for (int r = 0; r < rows_; ++r) {
    const double* in = &x[static_cast<size_t>(r) * x_cols];
    for (int k = row_start_[r]; k < row_start_[r + 1]; ++k) {
      const double v = values_[k];
      double* dst = &out[static_cast<size_t>(col_index_[k]) * x_cols];
      for (int c = 0; c < x_cols; ++c) dst[c] += v * in[c];
    }
  }
}

Tensor MatMulValue(const Tensor& a, const Tensor& b) {
  if (a.cols() != b.rows()) {
    throw ShapeError("matmul: inner dimensions differ, " + a.ShapeString() +
                     " x " + b.ShapeString());
  }
  Tensor c(a.rows(), b.cols());
  if (a.size() == 0 || b.size() == 0) return c;
  Eigen::Map<const RowMajor> ma(a.data().data(), a.rows(), a.cols());
  Eigen::Map<const RowMajor> mb(b.data().data(), b.rows(), b.cols());
  Eigen::Map<RowMajor> mc(c.data().data(), c.rows(), c.cols());
  mc.noalias() = ma * mb;
  return c;
}

}  // namespace dgform
