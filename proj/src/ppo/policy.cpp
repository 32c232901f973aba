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

#include "risnoma/ppo/policy.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace risnoma::ppo {

namespace {

constexpr double kHalfLogTwoPi = 0.91893853320467274178;

Parameter xavier(const std::string& name, std::size_t in, std::size_t out, std::mt19937_64& rng) {
  const double a = std::sqrt(6.0 / static_cast<double>(in + out));
  std::uniform_real_distribution<double> u(-a, a);
  Matrix w(in, out);
  for (Eigen::Index c = 0; c < w.cols(); ++c)
    for (Eigen::Index r = 0; r < w.rows(); ++r) w(r, c) = u(rng);
  return {name, std::move(w)};
}

Parameter zeros(const std::string& name, std::size_t rows, std::size_t cols) {
  return {name, Matrix::Zero(rows, cols)};
}

Vector dense_tanh(const Vector& x, const Parameter& w, const Parameter& b) {
  return ((w.value.transpose() * x) + b.value.transpose()).array().tanh().matrix();
}

Vector dense(const Vector& x, const Parameter& w, const Parameter& b) {
  return (w.value.transpose() * x) + b.value.transpose();
}

}  // namespace

ActorCritic::ActorCritic(std::size_t obs_dim, ActionSpec spec, std::size_t hidden,
                         std::uint64_t seed, double init_log_std,
                         double init_bernoulli_logit)
    : obs_dim_(obs_dim), spec_(spec) {
  if (obs_dim == 0 || hidden == 0) throw std::invalid_argument("ActorCritic: empty layer");
  if (spec.categories == 1) throw std::invalid_argument("ActorCritic: a categorical head needs >= 2 choices");
  std::mt19937_64 rng(seed);
  w1_ = xavier("actor.w1", obs_dim, hidden, rng);
  b1_ = zeros("actor.b1", 1, hidden);
  w2_ = xavier("actor.w2", hidden, hidden, rng);
  b2_ = zeros("actor.b2", 1, hidden);
  w_mu_ = xavier("actor.mu.w", hidden, spec.continuous, rng);
  b_mu_ = zeros("actor.mu.b", 1, spec.continuous);
  log_std_ = {"actor.log_std", Matrix::Constant(1, spec.continuous, init_log_std)};
  w_bern_ = xavier("actor.bern.w", hidden, spec.bernoulli, rng);
  b_bern_ = {"actor.bern.b", Matrix::Constant(1, spec.bernoulli, init_bernoulli_logit)};
  w_cat_ = xavier("actor.cat.w", hidden, spec.categories, rng);
  b_cat_ = zeros("actor.cat.b", 1, spec.categories);
  v1_ = xavier("critic.w1", obs_dim, hidden, rng);
  c1_ = zeros("critic.b1", 1, hidden);
  v2_ = xavier("critic.w2", hidden, hidden, rng);
  c2_ = zeros("critic.b2", 1, hidden);
  v_out_ = xavier("critic.out.w", hidden, 1, rng);
  c_out_ = zeros("critic.out.b", 1, 1);
}

std::vector<Parameter*> ActorCritic::parameters() {
  return {&w1_, &b1_, &w2_, &b2_, &w_mu_, &b_mu_, &log_std_, &w_bern_, &b_bern_,
          &w_cat_, &b_cat_, &v1_, &c1_, &v2_, &c2_, &v_out_, &c_out_};
}

std::vector<const Parameter*> ActorCritic::parameters() const {
  auto p = const_cast<ActorCritic*>(this)->parameters();
  return {p.begin(), p.end()};
}

BatchHeads ActorCritic::forward(Tape& tape, const Matrix& obs) {
  if (static_cast<std::size_t>(obs.cols()) != obs_dim_) throw std::invalid_argument("forward: observation width");
  const Var x = tape.constant(obs);
  const Var h1 = tanh(linear(x, tape.parameter(w1_), tape.parameter(b1_)));
  const Var h2 = tanh(linear(h1, tape.parameter(w2_), tape.parameter(b2_)));
  BatchHeads out;
  out.mean = linear(h2, tape.parameter(w_mu_), tape.parameter(b_mu_));
  out.log_std = clamp(tape.parameter(log_std_), kLogStdMin, kLogStdMax);
  out.bern_logits = linear(h2, tape.parameter(w_bern_), tape.parameter(b_bern_));
  out.cat_logits = linear(h2, tape.parameter(w_cat_), tape.parameter(b_cat_));
  const Var g1 = tanh(linear(x, tape.parameter(v1_), tape.parameter(c1_)));
  const Var g2 = tanh(linear(g1, tape.parameter(v2_), tape.parameter(c2_)));
  out.value = linear(g2, tape.parameter(v_out_), tape.parameter(c_out_));
  return out;
}

ActorCritic::Plain ActorCritic::forward_plain(const Vector& obs) const {
  if (static_cast<std::size_t>(obs.size()) != obs_dim_) throw std::invalid_argument("act: observation width");
  const Vector h1 = dense_tanh(obs, w1_, b1_);
  const Vector h2 = dense_tanh(h1, w2_, b2_);
  Plain p;
  p.mean = dense(h2, w_mu_, b_mu_);
  p.log_std = log_std_.value.row(0).transpose().cwiseMax(kLogStdMin).cwiseMin(kLogStdMax);
  p.bern = dense(h2, w_bern_, b_bern_);
  p.cat = dense(h2, w_cat_, b_cat_);
  return p;
}

double ActorCritic::value(const Vector& obs) const {
  const Vector g1 = dense_tanh(obs, v1_, c1_);
  const Vector g2 = dense_tanh(g1, v2_, c2_);
  return dense(g2, v_out_, c_out_)(0);
}

namespace {

HeadLogProbs plain_log_prob(const Vector& mean, const Vector& log_std, const Vector& bern,
                            const Vector& cat, const ActionSample& a) {
  HeadLogProbs lp;
  for (Eigen::Index i = 0; i < mean.size(); ++i) {
    const double z = (a.continuous(i) - mean(i)) * std::exp(-log_std(i));
    lp.gaussian += -0.5 * z * z - log_std(i) - kHalfLogTwoPi;
  }
  for (Eigen::Index i = 0; i < bern.size(); ++i)
    lp.bernoulli += a.bits[i] ? log_sigmoid(bern(i)) : log_sigmoid(-bern(i));
  if (cat.size() > 0) {
    const double m = cat.maxCoeff();
    const double lse = m + std::log((cat.array() - m).exp().sum());
    lp.categorical = cat(a.category) - lse;
  }
  return lp;
}

}  // namespace

ActionSample ActorCritic::act(const Vector& obs, bool stochastic, std::mt19937_64& rng) const {
  const auto p = forward_plain(obs);
  ActionSample a;
  a.continuous = p.mean;
  a.bits.assign(p.bern.size(), 0);
  if (stochastic) {
    std::normal_distribution<double> normal(0.0, 1.0);
    for (Eigen::Index i = 0; i < p.mean.size(); ++i)
      a.continuous(i) = p.mean(i) + std::exp(p.log_std(i)) * normal(rng);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    for (Eigen::Index i = 0; i < p.bern.size(); ++i) a.bits[i] = unit(rng) < sigmoid(p.bern(i)) ? 1 : 0;
    if (p.cat.size() > 0) {
      std::vector<double> w(p.cat.size());
      const double m = p.cat.maxCoeff();
      for (Eigen::Index i = 0; i < p.cat.size(); ++i) w[i] = std::exp(p.cat(i) - m);
      std::discrete_distribution<int> pick(w.begin(), w.end());
      a.category = pick(rng);
    }
  } else {
    for (Eigen::Index i = 0; i < p.bern.size(); ++i) a.bits[i] = p.bern(i) > 0.0 ? 1 : 0;
    if (p.cat.size() > 0) p.cat.maxCoeff(&a.category);
  }
  a.log_prob = plain_log_prob(p.mean, p.log_std, p.bern, p.cat, a).total();
  a.value = value(obs);
  return a;
}

HeadLogProbs ActorCritic::log_prob(const Vector& obs, const ActionSample& action) const {
  const auto p = forward_plain(obs);
  return plain_log_prob(p.mean, p.log_std, p.bern, p.cat, action);
}

Var joint_log_prob(const BatchHeads& h, const Matrix& raw, const Matrix& bits,
                   const Matrix& onehot) {
  Tape& t = *h.mean.tape();
  const Eigen::Index B = h.mean.rows();
  Var total = t.constant(Matrix::Zero(B, 1));
  if (h.mean.cols() > 0) {
    const Var z = mul(sub(t.constant(raw), h.mean), exp(neg(h.log_std)));
    const Var per = sub(scale(square(z), -0.5), h.log_std);
    total = add(total, shift(row_sum(per), -kHalfLogTwoPi * static_cast<double>(h.mean.cols())));
  }
  if (h.bern_logits.cols() > 0) {
    const Var on = mul(t.constant(bits), log_sigmoid(h.bern_logits));
    const Var off = mul(t.constant((1.0 - bits.array()).matrix()), log_sigmoid(neg(h.bern_logits)));
    total = add(total, row_sum(add(on, off)));
  }
  if (h.cat_logits.cols() > 0)
    total = add(total, row_sum(mul(t.constant(onehot), log_softmax(h.cat_logits))));
  return total;
}

Var joint_entropy(const BatchHeads& h) {
  Tape& t = *h.mean.tape();
  const Eigen::Index B = h.mean.rows();
  Var total = t.constant(Matrix::Zero(B, 1));
  if (h.mean.cols() > 0) {
    const double per_dim = 0.5 + kHalfLogTwoPi;
    const Var g = shift(sum(h.log_std), per_dim * static_cast<double>(h.mean.cols()));
    total = add(total, g);
  }
  if (h.bern_logits.cols() > 0) {
    const Var lp = log_sigmoid(h.bern_logits);
    const Var lq = log_sigmoid(neg(h.bern_logits));
    const Var e = neg(add(mul(exp(lp), lp), mul(exp(lq), lq)));
    total = add(total, row_sum(e));
  }
  if (h.cat_logits.cols() > 0) {
    const Var lp = log_softmax(h.cat_logits);
    total = add(total, neg(row_sum(mul(exp(lp), lp))));
  }
  return total;
}

}  // namespace risnoma::ppo
