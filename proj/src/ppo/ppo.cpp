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

#include "risnoma/ppo/ppo.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include <spdlog/spdlog.h>

namespace risnoma::ppo {

void RolloutBuffer::push(Transition t) {
  if (full()) throw std::logic_error("RolloutBuffer: push into a full buffer");
  items_.push_back(std::move(t));
}

GaeResult compute_gae(const std::vector<double>& rewards, const std::vector<double>& values,
                      const std::vector<bool>& dones, double last_value, double gamma,
                      double lambda, bool normalize) {
  const std::size_t n = rewards.size();
  if (values.size() != n || dones.size() != n) throw std::invalid_argument("compute_gae: length mismatch");
  GaeResult out;
  out.advantages.assign(n, 0.0);
  out.returns.assign(n, 0.0);
  double next_adv = 0.0;
  double next_value = last_value;
  for (std::size_t i = n; i-- > 0;) {
    const double live = dones[i] ? 0.0 : 1.0;
    const double delta = rewards[i] + gamma * next_value * live - values[i];
    next_adv = delta + gamma * lambda * live * next_adv;
    out.advantages[i] = next_adv;
    out.returns[i] = next_adv + values[i];
    next_value = values[i];
  }
  if (normalize && n > 1) {
    const double mean = std::accumulate(out.advantages.begin(), out.advantages.end(), 0.0) / n;
    double var = 0.0;
    for (double a : out.advantages) var += (a - mean) * (a - mean);
    const double sd = std::sqrt(var / n);
    for (double& a : out.advantages) a = (a - mean) / (sd + 1e-12);
  }
  return out;
}

GaeResult compute_gae(const RolloutBuffer& buffer, double last_value, double gamma, double lambda) {
  std::vector<double> r, v;
  std::vector<bool> d;
  for (const auto& t : buffer.items()) {
    r.push_back(t.reward);
    v.push_back(t.action.value);
    d.push_back(t.done);
  }
  return compute_gae(r, v, d, last_value, gamma, lambda, true);
}

Var clipped_surrogate(const Var& new_log_prob, const Matrix& old_log_prob,
                      const Matrix& advantages, double clip) {
  Tape& t = *new_log_prob.tape();
  const Var ratio = exp(sub(new_log_prob, t.constant(old_log_prob)));
  const Var adv = t.constant(advantages);
  return minimum(mul(ratio, adv), mul(clamp(ratio, 1.0 - clip, 1.0 + clip), adv));
}

Adam::Adam(std::vector<Parameter*> params, double lr, double beta1, double beta2, double eps)
    : params_(std::move(params)), lr_(lr), beta1_(beta1), beta2_(beta2), eps_(eps) {
  for (auto* p : params_) {
    m_.push_back(Matrix::Zero(p->value.rows(), p->value.cols()));
    v_.push_back(Matrix::Zero(p->value.rows(), p->value.cols()));
  }
}

void Adam::zero_grad() {
  for (auto* p : params_) p->zero_grad();
}

void Adam::step() {
  ++t_;
  const double c1 = 1.0 - std::pow(beta1_, static_cast<double>(t_));
  const double c2 = 1.0 - std::pow(beta2_, static_cast<double>(t_));
  for (std::size_t i = 0; i < params_.size(); ++i) {
    auto& p = *params_[i];
    m_[i] = beta1_ * m_[i] + (1.0 - beta1_) * p.grad;
    v_[i] = beta2_ * v_[i] + (1.0 - beta2_) * p.grad.cwiseProduct(p.grad);
    p.value.array() -= lr_ * (m_[i].array() / c1) / ((v_[i].array() / c2).sqrt() + eps_);
  }
}

double clip_grad_norm(const std::vector<Parameter*>& params, double max_norm) {
  double sq = 0.0;
  for (const auto* p : params) sq += p->grad.squaredNorm();
  const double norm = std::sqrt(sq);
  if (norm > max_norm && norm > 0.0)
    for (auto* p : params) p->grad *= max_norm / norm;
  return norm;
}

PpoAgent::PpoAgent(std::size_t obs_dim, ActionSpec spec, PpoConfig config, std::uint64_t seed)
    : config_(config),
      net_(obs_dim, spec, config.hidden, seed, config.init_log_std,
           config.init_bernoulli_logit),
      adam_(net_.parameters(), config.learning_rate),
      rng_(seed ^ 0x9e3779b97f4a7c15ULL),
      scaler_(config.gamma) {}

double RewardScaler::operator()(double reward, bool done) {
  ret_ = gamma_ * ret_ + reward;
  ++n_;
  const double delta = ret_ - mean_;
  mean_ += delta / static_cast<double>(n_);
  m2_ += delta * (ret_ - mean_);
  if (done) ret_ = 0.0;
  return reward / std();
}

double RewardScaler::std() const {
  if (n_ < 2) return 1.0;
  return std::max(std::sqrt(m2_ / static_cast<double>(n_ - 1)), 1e-8);
}

double PpoAgent::shape_reward(double reward, bool done) {
  return config_.scale_rewards ? scaler_(reward, done) : reward;
}

ActionSample PpoAgent::act(const Vector& obs, bool stochastic) {
  return net_.act(obs, stochastic, rng_);
}

UpdateStats PpoAgent::update(RolloutBuffer& buffer, double last_value) {
  const std::size_t n = buffer.size();
  UpdateStats stats;
  if (n == 0) return stats;
  const auto& spec = net_.spec();
  const auto gae = compute_gae(buffer, last_value, config_.gamma, config_.lambda);

  const Eigen::Index od = static_cast<Eigen::Index>(net_.obs_dim());
  Matrix obs(n, od), raw(n, spec.continuous), bits(n, spec.bernoulli), onehot(n, spec.categories);
  Matrix old_lp(n, 1), adv(n, 1), ret(n, 1);
  onehot.setZero();
  for (std::size_t i = 0; i < n; ++i) {
    const auto& t = buffer.items()[i];
    obs.row(i) = t.obs.transpose();
    if (spec.continuous) raw.row(i) = t.action.continuous.transpose();
    for (std::size_t b = 0; b < spec.bernoulli; ++b) bits(i, b) = t.action.bits[b];
    if (spec.categories) onehot(i, t.action.category) = 1.0;
    old_lp(i, 0) = t.action.log_prob;
    adv(i, 0) = gae.advantages[i];
    ret(i, 0) = gae.returns[i];
  }

  auto params = net_.parameters();
  std::vector<Matrix> backup;
  for (auto* p : params) backup.push_back(p->value);

  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), 0);
  const std::size_t mb = std::max<std::size_t>(1, std::min(config_.minibatch, n));
  std::size_t batches = 0;
  for (std::size_t epoch = 0; epoch < config_.epochs && !stats.aborted; ++epoch) {
    std::shuffle(idx.begin(), idx.end(), rng_);
    for (std::size_t start = 0; start < n; start += mb) {
      const std::size_t len = std::min(mb, n - start);
      const Eigen::Index L = static_cast<Eigen::Index>(len);
      Matrix o(L, od), r(L, spec.continuous), b(L, spec.bernoulli), c(L, spec.categories);
      Matrix olp(L, 1), a(L, 1), R(L, 1);
      for (std::size_t j = 0; j < len; ++j) {
        const std::size_t i = idx[start + j];
        o.row(j) = obs.row(i);
        r.row(j) = raw.row(i);
        b.row(j) = bits.row(i);
        c.row(j) = onehot.row(i);
        olp(j, 0) = old_lp(i, 0);
        a(j, 0) = adv(i, 0);
        R(j, 0) = ret(i, 0);
      }

      Tape tape;
      const auto heads = net_.forward(tape, o);
      const Var lp = joint_log_prob(heads, r, b, c);
      const Var surr = mean(clipped_surrogate(lp, olp, a, config_.clip));
      const Var vloss = mean(square(sub(heads.value, tape.constant(R))));
      const Var ent = mean(joint_entropy(heads));
      const Var loss = add(sub(scale(vloss, config_.value_coef), surr), scale(ent, -config_.entropy_coef));

      if (!std::isfinite(loss.scalar())) {
        for (std::size_t i = 0; i < params.size(); ++i) params[i]->value = backup[i];
        spdlog::warn("ppo: non-finite loss at update {}; parameters restored", updates_);
        stats.aborted = true;
        break;
      }
      adam_.zero_grad();
      tape.backward(loss);
      stats.grad_norm += clip_grad_norm(params, config_.max_grad_norm);
      adam_.step();

      const Matrix diff = olp - lp.value();
      stats.approx_kl += diff.mean();
      const Matrix ratio = (lp.value() - olp).array().exp().matrix();
      stats.clip_fraction +=
          ((ratio.array() - 1.0).abs() > config_.clip).cast<double>().mean();
      stats.policy_loss += -surr.scalar();
      stats.value_loss += vloss.scalar();
      stats.entropy += ent.scalar();
      ++batches;
    }
  }

  bool finite = true;
  for (auto* p : params) finite = finite && p->value.allFinite();
  if (!finite) {
    for (std::size_t i = 0; i < params.size(); ++i) params[i]->value = backup[i];
    spdlog::warn("ppo: non-finite parameters after update {}; restored", updates_);
    stats.aborted = true;
  }
  if (batches > 0) {
    const double d = static_cast<double>(batches);
    stats.policy_loss /= d;
    stats.value_loss /= d;
    stats.entropy /= d;
    stats.approx_kl /= d;
    stats.clip_fraction /= d;
    stats.grad_norm /= d;
  }
  buffer.clear();
  ++updates_;
  return stats;
}

}  // namespace risnoma::ppo
