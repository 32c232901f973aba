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

#pragma once

#include <cmath>
#include <cstddef>
#include <deque>
#include <functional>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace risnoma::ppo {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// A trainable array and its accumulated gradient.
struct Parameter {
  std::string name;
  Matrix value;
  Matrix grad;

  Parameter() = default;
  Parameter(std::string n, Matrix v) : name(std::move(n)), value(std::move(v)), grad(Matrix::Zero(value.rows(), value.cols())) {}
  void zero_grad() { grad.setZero(value.rows(), value.cols()); }
};

class Tape;

/// Handle to a node on a tape. Cheap to copy; valid while the tape lives.
class Var {
 public:
  Var() = default;
  const Matrix& value() const;
  const Matrix& grad() const;
  Eigen::Index rows() const { return value().rows(); }
  Eigen::Index cols() const { return value().cols(); }
  /// Value of a 1x1 node.
  double scalar() const;

 private:
  friend class Tape;
  Var(Tape* t, std::size_t id) : tape_(t), id_(id) {}
  Tape* tape_ = nullptr;
  std::size_t id_ = 0;

 public:
  Tape* tape() const { return tape_; }
  std::size_t id() const { return id_; }
};

/// Reverse-mode recording of matrix operations. Rows are batch samples.
class Tape {
 public:
  using Backward = std::function<void(Tape&, std::size_t self)>;

  Var constant(Matrix value);
  Var parameter(Parameter& p);
  /// Seeds d(root)/d(root) = 1 for a 1x1 root, propagates, and adds the
  /// result into every Parameter reached.
  void backward(const Var& root);

  Var record(Matrix value, std::vector<std::size_t> parents, Backward back);
  const Matrix& value(std::size_t id) const { return nodes_[id].value; }
  const Matrix& grad(std::size_t id) const { return nodes_[id].grad; }
  /// Adds `g` into the gradient of node `id`.
  void accumulate(std::size_t id, const Matrix& g);
  std::size_t size() const { return nodes_.size(); }

 private:
  struct Node {
    Matrix value;
    Matrix grad;
    std::vector<std::size_t> parents;
    Backward back;
    Parameter* param = nullptr;
  };
  std::deque<Node> nodes_;
};

// Binary ops broadcast the second operand when it is 1x1, 1xn or mx1.
Var add(const Var& a, const Var& b);
Var sub(const Var& a, const Var& b);
Var mul(const Var& a, const Var& b);
Var matmul(const Var& a, const Var& b);
/// a * W + b with b a 1xn row.
Var linear(const Var& x, const Var& w, const Var& b);

Var scale(const Var& a, double c);
Var shift(const Var& a, double c);
Var neg(const Var& a);
Var tanh(const Var& a);
Var exp(const Var& a);
Var log(const Var& a);
Var square(const Var& a);
/// log(1 / (1 + e^{-a})), computed stably.
Var log_sigmoid(const Var& a);
/// Row-wise log-softmax.
Var log_softmax(const Var& a);
/// Elementwise min of equally shaped nodes; ties send the gradient to `a`.
Var minimum(const Var& a, const Var& b);
/// Gradient passes where lo <= a <= hi.
Var clamp(const Var& a, double lo, double hi);
Var cols(const Var& a, Eigen::Index start, Eigen::Index count);

Var sum(const Var& a);
Var mean(const Var& a);
/// Sum across columns: m x n -> m x 1.
Var row_sum(const Var& a);

inline double log_sigmoid(double x) { return x >= 0.0 ? -std::log1p(std::exp(-x)) : x - std::log1p(std::exp(x)); }
inline double sigmoid(double x) { return std::exp(log_sigmoid(x)); }

}  // namespace risnoma::ppo
