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

#include "dgform/tensor/tape.h"

#include <Eigen/Core>
#include <algorithm>
#include <cmath>
#include <string>

#include "dgform/common/error.h"

namespace dgform {
namespace {

using RowMajor =
    Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using ConstMap = Eigen::Map<const RowMajor>;
using MutMap = Eigen::Map<RowMajor>;

Tape& TapeOf(Var a) {
  if (!a.valid()) throw ContractError("operation on an unbound Var");
  return *a.tape();
}

Tape& TapeOf(Var a, Var b) {
  Tape& t = TapeOf(a);
  if (b.tape() != &t) throw ContractError("operands live on different tapes");
  return t;
}

// Index map for broadcasting one operand against an output shape.
struct Broadcast {
  enum Kind { kSame, kRow, kScalar } kind;
  int cols;
  int Index(int i) const {
    switch (kind) {
      case kSame:
        return i;
      case kRow:
        return i % cols;
      default:
        return 0;
    }
  }
};

Broadcast KindFor(const Tensor& x, int rows, int cols, const char* op) {
  if (x.rows() == rows && x.cols() == cols) return {Broadcast::kSame, cols};
  if (x.rows() == 1 && x.cols() == 1) return {Broadcast::kScalar, cols};
  if (x.rows() == 1 && x.cols() == cols) return {Broadcast::kRow, cols};
  throw ShapeError(std::string(op) + ": cannot broadcast " + x.ShapeString() +
                   " to [" + std::to_string(rows) + "x" +
                   std::to_string(cols) + "]");
}

void OutputShape(const Tensor& a, const Tensor& b, const char* op, int* rows,
                 int* cols) {
  *rows = std::max(a.rows(), b.rows());
  *cols = std::max(a.cols(), b.cols());
  KindFor(a, *rows, *cols, op);
  KindFor(b, *rows, *cols, op);
}

// Shared driver for binary elementwise ops. da/db give the local partials.
template <typename F, typename DA, typename DB>
Var Binary(Var a, Var b, const char* name, F f, DA da, DB db) {
  Tape& tape = TapeOf(a, b);
  const Tensor& va = a.value();
  const Tensor& vb = b.value();
  int rows = 0, cols = 0;
  OutputShape(va, vb, name, &rows, &cols);
  const Broadcast ba = KindFor(va, rows, cols, name);
  const Broadcast bb = KindFor(vb, rows, cols, name);
  Tensor out(rows, cols);
  for (int i = 0; i < out.size(); ++i) {
    out[i] = f(va[ba.Index(i)], vb[bb.Index(i)]);
  }
  const int ia = a.id(), ib = b.id();
  return tape.Record(
      std::move(out), {ia, ib}, [ia, ib, ba, bb, da, db](Tape& t, int self) {
        const Tensor& x = t.value(ia);
        const Tensor& y = t.value(ib);
        std::span<const double> g = t.grad(self);
        if (t.needs_grad(ia)) {
          std::span<double> ga = t.GradBuffer(ia);
          for (size_t i = 0; i < g.size(); ++i) {
            const int xi = ba.Index(static_cast<int>(i));
            const int yi = bb.Index(static_cast<int>(i));
            ga[xi] += g[i] * da(x[xi], y[yi]);
          }
        }
        if (t.needs_grad(ib)) {
          std::span<double> gb = t.GradBuffer(ib);
          for (size_t i = 0; i < g.size(); ++i) {
            const int xi = ba.Index(static_cast<int>(i));
            const int yi = bb.Index(static_cast<int>(i));
            gb[yi] += g[i] * db(x[xi], y[yi]);
          }
        }
      });
}

// Shared driver for unary elementwise ops; d receives (input, output).
template <typename F, typename D>
Var Unary(Var a, F f, D d) {
  Tape& tape = TapeOf(a);
  const Tensor& va = a.value();
  Tensor out(va.rows(), va.cols());
  for (int i = 0; i < out.size(); ++i) out[i] = f(va[i]);
  const int ia = a.id();
  return tape.Record(std::move(out), {ia}, [ia, d](Tape& t, int self) {
    if (!t.needs_grad(ia)) return;
    const Tensor& x = t.value(ia);
    const Tensor& y = t.value(self);
    std::span<const double> g = t.grad(self);
    std::span<double> ga = t.GradBuffer(ia);
    for (size_t i = 0; i < g.size(); ++i) ga[i] += g[i] * d(x[i], y[i]);
  });
}

}  // namespace

const Tensor& Var::value() const {
  if (!valid()) throw ContractError("value() of an unbound Var");
  return tape_->value(id_);
}

Var Tape::Constant(Tensor value) {
  value.set_requires_grad(false);
  value.ClearGrad();
  Node node;
  node.value = std::move(value);
  nodes_.push_back(std::move(node));
  return Var(this, size() - 1);
}

Var Tape::Leaf(Tensor& parameter) {
  Node node;
  node.value = Tensor(parameter.rows(), parameter.cols(),
                      std::vector<double>(parameter.data().begin(),
                                          parameter.data().end()));
  node.leaf = &parameter;
  node.needs_grad = parameter.requires_grad();
  nodes_.push_back(std::move(node));
  return Var(this, size() - 1);
}

Var Tape::Record(Tensor value, std::vector<int> inputs, BackwardFn backward) {
  if (consumed_) throw ContractError("recording on a consumed tape");
  Node node;
  node.value = std::move(value);
  node.needs_grad = std::any_of(inputs.begin(), inputs.end(),
                                [this](int i) { return nodes_[i].needs_grad; });
  node.inputs = std::move(inputs);
  if (node.needs_grad) node.backward = std::move(backward);
  nodes_.push_back(std::move(node));
  return Var(this, size() - 1);
}

std::span<double> Tape::GradBuffer(int id) {
  Node& node = nodes_[id];
  if (node.grad.size() != static_cast<size_t>(node.value.size())) {
    node.grad.assign(node.value.size(), 0.0);
  }
  return node.grad;
}

void Tape::AccumulateGrad(int id, std::span<const double> delta) {
  std::span<double> g = GradBuffer(id);
  for (size_t i = 0; i < delta.size(); ++i) g[i] += delta[i];
}

void Tape::Backward(Var loss) {
  if (consumed_) throw ContractError("backward called twice on the same tape");
  if (loss.tape() != this) throw ContractError("loss not recorded on tape");
  if (loss.value().size() != 1) {
    throw ContractError("backward needs a scalar loss, got " +
                        loss.value().ShapeString());
  }
  consumed_ = true;
  if (!nodes_[loss.id()].needs_grad) return;
  GradBuffer(loss.id())[0] = 1.0;
  for (int id = loss.id(); id >= 0; --id) {
    Node& node = nodes_[id];
    if (!node.needs_grad || node.grad.empty()) continue;
    if (node.leaf != nullptr) {
      std::span<double> dst = node.leaf->MutableGrad();
      for (size_t i = 0; i < dst.size(); ++i) dst[i] += node.grad[i];
    } else if (node.backward) {
      node.backward(*this, id);
    }
  }
}

Var MatMul(Var a, Var b) {
  Tape& tape = TapeOf(a, b);
  Tensor out = MatMulValue(a.value(), b.value());
  const int ia = a.id(), ib = b.id();
  return tape.Record(std::move(out), {ia, ib}, [ia, ib](Tape& t, int self) {
    const Tensor& x = t.value(ia);
    const Tensor& y = t.value(ib);
    std::span<const double> g = t.grad(self);
    ConstMap mg(g.data(), x.rows(), y.cols());
    if (t.needs_grad(ia)) {
      std::span<double> ga = t.GradBuffer(ia);
      MutMap(ga.data(), x.rows(), x.cols()).noalias() +=
          mg * ConstMap(y.data().data(), y.rows(), y.cols()).transpose();
    }
    if (t.needs_grad(ib)) {
      std::span<double> gb = t.GradBuffer(ib);
      MutMap(gb.data(), y.rows(), y.cols()).noalias() +=
          ConstMap(x.data().data(), x.rows(), x.cols()).transpose() * mg;
    }
  });
}

Var Add(Var a, Var b) {
  return Binary(
      a, b, "add", [](double x, double y) { return x + y; },
      [](double, double) { return 1.0; }, [](double, double) { return 1.0; });
}

Var Sub(Var a, Var b) {
  return Binary(
      a, b, "sub", [](double x, double y) { return x - y; },
      [](double, double) { return 1.0; }, [](double, double) { return -1.0; });
}

Var Mul(Var a, Var b) {
  return Binary(
      a, b, "mul", [](double x, double y) { return x * y; },
      [](double, double y) { return y; }, [](double x, double) { return x; });
}

Var Minimum(Var a, Var b) {
  // ties send the gradient to the first operand
  return Binary(
      a, b, "minimum", [](double x, double y) { return std::min(x, y); },
      [](double x, double y) { return x <= y ? 1.0 : 0.0; },
      [](double x, double y) { return x <= y ? 0.0 : 1.0; });
}

Var Scale(Var a, double factor) {
  return Unary(
      a, [factor](double x) { return factor * x; },
      [factor](double, double) { return factor; });
}

Var AddScalar(Var a, double offset) {
  return Unary(
      a, [offset](double x) { return x + offset; },
      [](double, double) { return 1.0; });
}

Var Neg(Var a) { return Scale(a, -1.0); }

Var Relu(Var a) {
  return Unary(
      a, [](double x) { return x > 0.0 ? x : 0.0; },
      [](double x, double) { return x > 0.0 ? 1.0 : 0.0; });
}

Var Tanh(Var a) {
  return Unary(
      a, [](double x) { return std::tanh(x); },
      [](double, double y) { return 1.0 - y * y; });
}

Var Exp(Var a) {
  return Unary(
      a, [](double x) { return std::exp(x); },
      [](double, double y) { return y; });
}

Var Log(Var a) {
  for (double v : a.value().data()) {
    if (!(v > 0.0)) {
      throw DomainError("log of non-positive value " + std::to_string(v));
    }
  }
  return Unary(
      a, [](double x) { return std::log(x); },
      [](double x, double) { return 1.0 / x; });
}

Var Square(Var a) {
  return Unary(
      a, [](double x) { return x * x; },
      [](double x, double) { return 2.0 * x; });
}

Var Clamp(Var a, double lo, double hi) {
  return Unary(
      a, [lo, hi](double x) { return std::clamp(x, lo, hi); },
      [lo, hi](double x, double) { return (x >= lo && x <= hi) ? 1.0 : 0.0; });
}

Var Sum(Var a) {
  Tape& tape = TapeOf(a);
  double total = 0.0;
  for (double v : a.value().data()) total += v;
  const int ia = a.id();
  return tape.Record(Tensor::Scalar(total), {ia}, [ia](Tape& t, int self) {
    if (!t.needs_grad(ia)) return;
    const double g = t.grad(self)[0];
    for (double& v : t.GradBuffer(ia)) v += g;
  });
}

Var Mean(Var a) {
  const int n = a.value().size();
  if (n == 0) throw ShapeError("mean of an empty tensor");
  return Scale(Sum(a), 1.0 / n);
}

Var MeanRows(Var a) {
  Tape& tape = TapeOf(a);
  const Tensor& x = a.value();
  if (x.rows() == 0) throw ShapeError("mean over zero rows");
  Tensor out(1, x.cols());
  for (int r = 0; r < x.rows(); ++r) {
    for (int c = 0; c < x.cols(); ++c) out[c] += x(r, c);
  }
  const double inv = 1.0 / x.rows();
  for (double& v : out.data()) v *= inv;
  const int ia = a.id();
  return tape.Record(std::move(out), {ia}, [ia, inv](Tape& t, int self) {
    if (!t.needs_grad(ia)) return;
    std::span<const double> g = t.grad(self);
    std::span<double> ga = t.GradBuffer(ia);
    const int cols = static_cast<int>(g.size());
    for (size_t i = 0; i < ga.size(); ++i) ga[i] += g[i % cols] * inv;
  });
}

Var SumCols(Var a) {
  Tape& tape = TapeOf(a);
  const Tensor& x = a.value();
  Tensor out(x.rows(), 1);
  for (int r = 0; r < x.rows(); ++r) {
    for (int c = 0; c < x.cols(); ++c) out[r] += x(r, c);
  }
  const int ia = a.id();
  const int cols = x.cols();
  return tape.Record(std::move(out), {ia}, [ia, cols](Tape& t, int self) {
    if (!t.needs_grad(ia)) return;
    std::span<const double> g = t.grad(self);
    std::span<double> ga = t.GradBuffer(ia);
    for (size_t i = 0; i < ga.size(); ++i) ga[i] += g[i / cols];
  });
}

Var ConcatCols(const std::vector<Var>& parts) {
  if (parts.empty()) throw ShapeError("concat of zero parts");
  Tape& tape = TapeOf(parts.front());
  const int rows = parts.front().rows();
  int cols = 0;
  std::vector<int> ids, offsets;
  for (const Var& p : parts) {
    if (p.tape() != &tape) throw ContractError("concat across tapes");
    if (p.rows() != rows) throw ShapeError("concat_cols: row counts differ");
    ids.push_back(p.id());
    offsets.push_back(cols);
    cols += p.cols();
  }
  Tensor out(rows, cols);
  for (size_t k = 0; k < parts.size(); ++k) {
    const Tensor& v = parts[k].value();
    for (int r = 0; r < rows; ++r) {
      std::copy_n(&v.data()[static_cast<size_t>(r) * v.cols()], v.cols(),
                  &out(r, offsets[k]));
    }
  }
  return tape.Record(std::move(out), ids,
                     [ids, offsets, cols](Tape& t, int self) {
                       std::span<const double> g = t.grad(self);
                       for (size_t k = 0; k < ids.size(); ++k) {
                         if (!t.needs_grad(ids[k])) continue;
                         const Tensor& v = t.value(ids[k]);
                         std::span<double> gk = t.GradBuffer(ids[k]);
                         for (int r = 0; r < v.rows(); ++r) {
                           for (int c = 0; c < v.cols(); ++c) {
                             gk[static_cast<size_t>(r) * v.cols() + c] +=
                                 g[static_cast<size_t>(r) * cols + offsets[k] +
                                   c];
                           }
                         }
                       }
                     });
}

Var ConcatRows(const std::vector<Var>& parts) {
  if (parts.empty()) throw ShapeError("concat of zero parts");
  Tape& tape = TapeOf(parts.front());
  const int cols = parts.front().cols();
  std::vector<int> ids, offsets;
  std::vector<double> data;
  int rows = 0;
  for (const Var& p : parts) {
    if (p.tape() != &tape) throw ContractError("concat across tapes");
    if (p.cols() != cols) throw ShapeError("concat_rows: column counts differ");
    ids.push_back(p.id());
    offsets.push_back(rows * cols);
    rows += p.rows();
    data.insert(data.end(), p.value().data().begin(), p.value().data().end());
  }
  return tape.Record(Tensor(rows, cols, std::move(data)), ids,
                     [ids, offsets](Tape& t, int self) {
                       std::span<const double> g = t.grad(self);
                       for (size_t k = 0; k < ids.size(); ++k) {
                         if (!t.needs_grad(ids[k])) continue;
                         std::span<double> gk = t.GradBuffer(ids[k]);
                         for (size_t i = 0; i < gk.size(); ++i) {
                           gk[i] += g[offsets[k] + i];
                         }
                       }
                     });
}

Var SliceRows(Var a, int start, int count) {
  Tape& tape = TapeOf(a);
  const Tensor& x = a.value();
  if (start < 0 || count < 0 || start + count > x.rows()) {
    throw ShapeError("slice_rows out of range");
  }
  const int cols = x.cols();
  std::vector<double> data(x.data().begin() + static_cast<size_t>(start) * cols,
                           x.data().begin() +
                               static_cast<size_t>(start + count) * cols);
  const int ia = a.id();
  return tape.Record(Tensor(count, cols, std::move(data)), {ia},
                     [ia, start, cols](Tape& t, int self) {
                       if (!t.needs_grad(ia)) return;
                       std::span<const double> g = t.grad(self);
                       std::span<double> ga = t.GradBuffer(ia);
                       const size_t base = static_cast<size_t>(start) * cols;
                       for (size_t i = 0; i < g.size(); ++i) ga[base + i] += g[i];
                     });
}

Var SliceCols(Var a, int start, int count) {
  Tape& tape = TapeOf(a);
  const Tensor& x = a.value();
  if (start < 0 || count < 0 || start + count > x.cols()) {
    throw ShapeError("slice_cols out of range");
  }
  Tensor out(x.rows(), count);
  for (int r = 0; r < x.rows(); ++r) {
    for (int c = 0; c < count; ++c) out(r, c) = x(r, start + c);
  }
  const int ia = a.id();
  const int cols = x.cols();
  return tape.Record(std::move(out), {ia},
                     [ia, start, count, cols](Tape& t, int self) {
                       if (!t.needs_grad(ia)) return;
                       std::span<const double> g = t.grad(self);
                       std::span<double> ga = t.GradBuffer(ia);
                       const int rows = static_cast<int>(g.size()) / count;
                       for (int r = 0; r < rows; ++r) {
                         for (int c = 0; c < count; ++c) {
                           ga[static_cast<size_t>(r) * cols + start + c] +=
                               g[static_cast<size_t>(r) * count + c];
                         }
                       }
                     });
}

Var Reshape(Var a, int rows, int cols) {
  Tape& tape = TapeOf(a);
  const Tensor& x = a.value();
  if (rows * cols != x.size()) {
    throw ShapeError("reshape " + x.ShapeString() + " to [" +
                     std::to_string(rows) + "x" + std::to_string(cols) + "]");
  }
  std::vector<double> data(x.data().begin(), x.data().end());
  const int ia = a.id();
  return tape.Record(Tensor(rows, cols, std::move(data)), {ia},
                     [ia](Tape& t, int self) {
                       if (!t.needs_grad(ia)) return;
                       t.AccumulateGrad(ia, t.grad(self));
                     });
}

Var SpMM(const SparseMatrix& m, Var x) {
  Tape& tape = TapeOf(x);
  Tensor out = m.Multiply(x.value());
  const int ix = x.id();
  // the matrix is captured by value; graph topologies are small
  return tape.Record(std::move(out), {ix}, [ix, m](Tape& t, int self) {
    if (!t.needs_grad(ix)) return;
    const int cols = t.value(ix).cols();
    m.MultiplyTransposeAccumulate(t.grad(self), cols, t.GradBuffer(ix));
  });
}

Var RepeatRows(Var a, int rows) {
  Tape& tape = TapeOf(a);
  const Tensor& x = a.value();
  if (x.rows() != 1) throw ShapeError("repeat_rows expects a row vector");
  Tensor out(rows, x.cols());
  for (int r = 0; r < rows; ++r) {
    std::copy(x.data().begin(), x.data().end(), &out(r, 0));
  }
  const int ia = a.id();
  const int cols = x.cols();
  return tape.Record(std::move(out), {ia}, [ia, cols](Tape& t, int self) {
    if (!t.needs_grad(ia)) return;
    std::span<const double> g = t.grad(self);
    std::span<double> ga = t.GradBuffer(ia);
    for (size_t i = 0; i < g.size(); ++i) ga[i % cols] += g[i];
  });
}

}  // namespace dgform
