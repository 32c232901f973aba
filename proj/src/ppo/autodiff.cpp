/*
 * SPDX-FileCopyrightText: Copyright (c) 2026 The risnoma Authors
 * SPDX-License-Identifier: Apache-2.0
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 * http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include "risnoma/ppo/autodiff.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace risnoma::ppo {

const Matrix& Var::value() const { return tape_->value(id_); }
const Matrix& Var::grad() const { return tape_->grad(id_); }

double Var::scalar() const {
  if (rows() != 1 || cols() != 1) throw std::logic_error("Var::scalar on a non-scalar node");
  return value()(0, 0);
}

Var Tape::constant(Matrix value) { return record(std::move(value), {}, nullptr); }

Var Tape::parameter(Parameter& p) {
  Var v = record(p.value, {}, nullptr);
  nodes_[v.id_].param = &p;
  return v;
}

Var Tape::record(Matrix value, std::vector<std::size_t> parents, Backward back) {
  nodes_.push_back({std::move(value), Matrix(), std::move(parents), std::move(back), nullptr});
  return Var(this, nodes_.size() - 1);
}

void Tape::accumulate(std::size_t id, const Matrix& g) {
  auto& n = nodes_[id];
  if (n.grad.size() == 0)
    n.grad = g;
  else
    n.grad += g;
}

void Tape::backward(const Var& root) {
  if (root.tape_ != this) throw std::logic_error("Tape::backward: foreign node");
  if (root.rows() != 1 || root.cols() != 1) throw std::logic_error("Tape::backward: root must be 1x1");
  for (auto& n : nodes_) n.grad.resize(0, 0);
  nodes_[root.id_].grad = Matrix::Ones(1, 1);
  for (std::size_t i = root.id_ + 1; i-- > 0;) {
    auto& n = nodes_[i];
    if (n.grad.size() == 0) n.grad = Matrix::Zero(n.value.rows(), n.value.cols());
    if (n.back) n.back(*this, i);
    if (n.param) n.param->grad += n.grad;
  }
}

namespace {

enum class Broadcast { same, scalar, row, col };

Broadcast broadcast_kind(const Matrix& a, const Matrix& b) {
  if (a.rows() == b.rows() && a.cols() == b.cols()) return Broadcast::same;
  if (b.rows() == 1 && b.cols() == 1) return Broadcast::scalar;
  if (b.rows() == 1 && b.cols() == a.cols()) return Broadcast::row;
  if (b.cols() == 1 && b.rows() == a.rows()) return Broadcast::col;
  throw std::invalid_argument("autodiff: incompatible shapes");
}

Matrix expand(const Matrix& b, Broadcast k, Eigen::Index rows, Eigen::Index cols) {
  switch (k) {
    case Broadcast::same: return b;
    case Broadcast::scalar: return Matrix::Constant(rows, cols, b(0, 0));
    case Broadcast::row: return b.replicate(rows, 1);
    case Broadcast::col: return b.replicate(1, cols);
  }
  return b;
}

Matrix reduce(const Matrix& g, Broadcast k) {
  switch (k) {
    case Broadcast::same: return g;
    case Broadcast::scalar: return Matrix::Constant(1, 1, g.sum());
    case Broadcast::row: return g.colwise().sum();
    case Broadcast::col: return g.rowwise().sum();
  }
  return g;
}

Tape& tape_of(const Var& a, const Var& b) {
  if (a.tape() != b.tape() || a.tape() == nullptr) throw std::logic_error("autodiff: nodes from different tapes");
  return *a.tape();
}

// Unary elementwise op with derivative dy/dx given as a function of (x, y).
template <class F, class D>
Var unary(const Var& a, F f, D dfdx) {
  Tape& t = *a.tape();
  Matrix y = a.value().unaryExpr(f);
  const std::size_t ia = a.id();
  return t.record(std::move(y), {ia}, [ia, dfdx](Tape& tp, std::size_t self) {
    const Matrix& x = tp.value(ia);
    const Matrix& yv = tp.value(self);
    Matrix d = x.binaryExpr(yv, dfdx);
    tp.accumulate(ia, tp.grad(self).cwiseProduct(d));
  });
}

}  // namespace

Var add(const Var& a, const Var& b) {
  Tape& t = tape_of(a, b);
  const auto k = broadcast_kind(a.value(), b.value());
  Matrix y = a.value() + expand(b.value(), k, a.rows(), a.cols());
  const std::size_t ia = a.id(), ib = b.id();
  return t.record(std::move(y), {ia, ib}, [ia, ib, k](Tape& tp, std::size_t self) {
    tp.accumulate(ia, tp.grad(self));
    tp.accumulate(ib, reduce(tp.grad(self), k));
  });
}

Var sub(const Var& a, const Var& b) {
  Tape& t = tape_of(a, b);
  const auto k = broadcast_kind(a.value(), b.value());
  Matrix y = a.value() - expand(b.value(), k, a.rows(), a.cols());
  const std::size_t ia = a.id(), ib = b.id();
  return t.record(std::move(y), {ia, ib}, [ia, ib, k](Tape& tp, std::size_t self) {
    tp.accumulate(ia, tp.grad(self));
    tp.accumulate(ib, -reduce(tp.grad(self), k));
  });
}

Var mul(const Var& a, const Var& b) {
  Tape& t = tape_of(a, b);
  const auto k = broadcast_kind(a.value(), b.value());
  Matrix y = a.value().cwiseProduct(expand(b.value(), k, a.rows(), a.cols()));
  const std::size_t ia = a.id(), ib = b.id();
  return t.record(std::move(y), {ia, ib}, [ia, ib, k](Tape& tp, std::size_t self) {
    const Matrix& g = tp.grad(self);
    const Matrix& av = tp.value(ia);
    tp.accumulate(ia, g.cwiseProduct(expand(tp.value(ib), k, av.rows(), av.cols())));
    tp.accumulate(ib, reduce(g.cwiseProduct(av), k));
  });
}

Var matmul(const Var& a, const Var& b) {
  Tape& t = tape_of(a, b);
  if (a.cols() != b.rows()) throw std::invalid_argument("matmul: inner dimensions differ");
  Matrix y = a.value() * b.value();
  const std::size_t ia = a.id(), ib = b.id();
  return t.record(std::move(y), {ia, ib}, [ia, ib](Tape& tp, std::size_t self) {
    const Matrix& g = tp.grad(self);
    tp.accumulate(ia, g * tp.value(ib).transpose());
    tp.accumulate(ib, tp.value(ia).transpose() * g);
  });
}

Var linear(const Var& x, const Var& w, const Var& b) { return add(matmul(x, w), b); }

Var scale(const Var& a, double c) {
  return unary(a, [c](double x) { return c * x; }, [c](double, double) { return c; });
}

Var shift(const Var& a, double c) {
  return unary(a, [c](double x) { return x + c; }, [](double, double) { return 1.0; });
}

Var neg(const Var& a) { return scale(a, -1.0); }

Var tanh(const Var& a) {
  return unary(a, [](double x) { return std::tanh(x); }, [](double, double y) { return 1.0 - y * y; });
}

Var exp(const Var& a) {
  return unary(a, [](double x) { return std::exp(x); }, [](double, double y) { return y; });
}

Var log(const Var& a) {
  return unary(a, [](double x) { return std::log(x); }, [](double x, double) { return 1.0 / x; });
}

Var square(const Var& a) {
  return unary(a, [](double x) { return x * x; }, [](double x, double) { return 2.0 * x; });
}

Var log_sigmoid(const Var& a) {
  return unary(a, [](double x) { return log_sigmoid(x); },
               [](double x, double) { return sigmoid(-x); });
}

Var log_softmax(const Var& a) {
  Tape& t = *a.tape();
  const Matrix& z = a.value();
  Matrix y(z.rows(), z.cols());
  for (Eigen::Index r = 0; r < z.rows(); ++r) {
    const double m = z.row(r).maxCoeff();
    const double lse = m + std::log((z.row(r).array() - m).exp().sum());
    y.row(r) = z.row(r).array() - lse;
  }
  const std::size_t ia = a.id();
  return t.record(std::move(y), {ia}, [ia](Tape& tp, std::size_t self) {
    const Matrix& g = tp.grad(self);
    const Matrix p = tp.value(self).array().exp().matrix();
    const Vector gs = g.rowwise().sum();
    tp.accumulate(ia, g - (p.array().colwise() * gs.array()).matrix());
  });
}

Var minimum(const Var& a, const Var& b) {
  Tape& t = tape_of(a, b);
  if (a.rows() != b.rows() || a.cols() != b.cols()) throw std::invalid_argument("minimum: shape mismatch");
  Matrix y = a.value().cwiseMin(b.value());
  const std::size_t ia = a.id(), ib = b.id();
  return t.record(std::move(y), {ia, ib}, [ia, ib](Tape& tp, std::size_t self) {
    const Matrix& g = tp.grad(self);
    const Matrix mask = (tp.value(ia).array() <= tp.value(ib).array()).cast<double>().matrix();
    tp.accumulate(ia, g.cwiseProduct(mask));
    tp.accumulate(ib, g.cwiseProduct((1.0 - mask.array()).matrix()));
  });
}

Var clamp(const Var& a, double lo, double hi) {
  return unary(a, [lo, hi](double x) { return std::clamp(x, lo, hi); },
               [lo, hi](double x, double) { return x >= lo && x <= hi ? 1.0 : 0.0; });
}

Var cols(const Var& a, Eigen::Index start, Eigen::Index count) {
  Tape& t = *a.tape();
  if (start < 0 || count < 0 || start + count > a.cols()) throw std::out_of_range("cols: slice out of range");
  Matrix y = a.value().middleCols(start, count);
  const std::size_t ia = a.id();
  return t.record(std::move(y), {ia}, [ia, start, count](Tape& tp, std::size_t self) {
    const Matrix& av = tp.value(ia);
    Matrix g = Matrix::Zero(av.rows(), av.cols());
    g.middleCols(start, count) = tp.grad(self);
    tp.accumulate(ia, g);
  });
}

Var sum(const Var& a) {
  Tape& t = *a.tape();
  const std::size_t ia = a.id();
  return t.record(Matrix::Constant(1, 1, a.value().sum()), {ia}, [ia](Tape& tp, std::size_t self) {
    const Matrix& av = tp.value(ia);
    tp.accumulate(ia, Matrix::Constant(av.rows(), av.cols(), tp.grad(self)(0, 0)));
  });
}

Var mean(const Var& a) { return scale(sum(a), 1.0 / static_cast<double>(a.value().size())); }

Var row_sum(const Var& a) {
  Tape& t = *a.tape();
  const std::size_t ia = a.id();
  return t.record(a.value().rowwise().sum(), {ia}, [ia](Tape& tp, std::size_t self) {
    tp.accumulate(ia, tp.grad(self).replicate(1, tp.value(ia).cols()));
  });
}

}  // namespace risnoma::ppo
