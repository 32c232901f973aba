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

#include <cstdint>
#include <random>
#include <vector>

#include "risnoma/ppo/autodiff.hpp"
#include "risnoma/ppo/policy.hpp"

namespace risnoma::ppo {

struct PpoConfig {
  double gamma = 0.99;
  double lambda = 0.95;
  double clip = 0.2;
  double learning_rate = 2e-4;
  std::size_t epochs = 4;
  std::size_t minibatch = 32;
  double value_coef = 0.5;
  double entropy_coef = 0.01;
  double max_grad_norm = 0.5;
  std::size_t buffer_capacity = 128;
  std::size_t hidden = 128;
  double init_log_std = -0.5;
  double init_bernoulli_logit = 2.0;
  /// Divide rewards by the running std of the discounted return.
  bool scale_rewards = true;
};

struct Transition {
  Vector obs;
  ActionSample action;
  double reward = 0.0;
  bool done = false;
};

/// Fixed-capacity on-policy storage, flushed after every update.
class RolloutBuffer {
 public:
  explicit RolloutBuffer(std::size_t capacity) : capacity_(capacity) {}
  void push(Transition t);
  bool full() const { return items_.size() >= capacity_; }
  std::size_t size() const { return items_.size(); }
  std::size_t capacity() const { return capacity_; }
  const std::vector<Transition>& items() const { return items_; }
  void clear() { items_.clear(); }

 private:
  std::size_t capacity_;
  std::vector<Transition> items_;
};

struct GaeResult {
  std::vector<double> advantages;
  std::vector<double> returns;
};

/// GAE over one trajectory segment. `last_value` bootstraps the state after
/// the final transition. Returns are advantages plus values, taken before
/// the optional normalisation of the advantages.
GaeResult compute_gae(const std::vector<double>& rewards, const std::vector<double>& values,
                      const std::vector<bool>& dones, double last_value, double gamma,
                      double lambda, bool normalize = true);
GaeResult compute_gae(const RolloutBuffer& buffer, double last_value, double gamma, double lambda);

/// Per-sample clipped surrogate min(r A, clip(r, 1-eps, 1+eps) A), r = e^{new-old}.
Var clipped_surrogate(const Var& new_log_prob, const Matrix& old_log_prob,
                      const Matrix& advantages, double clip);

class Adam {
 public:
  Adam(std::vector<Parameter*> params, double lr, double beta1 = 0.9, double beta2 = 0.999,
       double eps = 1e-8);
  void step();
  void zero_grad();
  std::size_t steps() const { return t_; }

 private:
  std::vector<Parameter*> params_;
  std::vector<Matrix> m_, v_;
  double lr_, beta1_, beta2_, eps_;
  std::size_t t_ = 0;
};

/// Scales all gradients so their global L2 norm is at most `max_norm`;
/// returns the norm before scaling.
double clip_grad_norm(const std::vector<Parameter*>& params, double max_norm);

struct UpdateStats {
  double policy_loss = 0.0;
  double value_loss = 0.0;
  double entropy = 0.0;
  double approx_kl = 0.0;
  double clip_fraction = 0.0;
  double grad_norm = 0.0;
  bool aborted = false;
};

/// Running std of the discounted return, for reward scaling.
class RewardScaler {
 public:
  explicit RewardScaler(double gamma) : gamma_(gamma) {}
  /// Updates the statistics with `reward` and returns it divided by the std.
  double operator()(double reward, bool done);
  double std() const;

 private:
  double gamma_;
  double ret_ = 0.0;
  double mean_ = 0.0;
  double m2_ = 0.0;
  std::size_t n_ = 0;
};

class PpoAgent {
 public:
  PpoAgent(std::size_t obs_dim, ActionSpec spec, PpoConfig config, std::uint64_t seed);

  ActionSample act(const Vector& obs, bool stochastic = true);
  double value(const Vector& obs) const { return net_.value(obs); }

  /// Computes advantages for the buffer, runs the epochs and flushes it.
  UpdateStats update(RolloutBuffer& buffer, double last_value);

  ActorCritic& network() { return net_; }
  const ActorCritic& network() const { return net_; }
  const PpoConfig& config() const { return config_; }
  std::mt19937_64& rng() { return rng_; }
  std::size_t updates() const { return updates_; }
  /// Reward as stored in the buffer (scaled when enabled).
  double shape_reward(double reward, bool done);

 private:
  PpoConfig config_;
  ActorCritic net_;
  Adam adam_;
  std::mt19937_64 rng_;
  std::size_t updates_ = 0;
  RewardScaler scaler_;
};

}  // namespace risnoma::ppo
