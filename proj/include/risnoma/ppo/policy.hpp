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

namespace risnoma::ppo {

/// Shape of a hybrid action: a diagonal Gaussian block, independent
/// Bernoulli flags and at most one categorical choice (0 disables it).
struct ActionSpec {
  std::size_t continuous = 0;
  std::size_t bernoulli = 0;
  std::size_t categories = 0;
};

/// One sampled action. `continuous` holds the raw (unsquashed) Gaussian draw.
struct ActionSample {
  Vector continuous;
  std::vector<int> bits;
  int category = 0;
  double log_prob = 0.0;
  double value = 0.0;
};

struct HeadLogProbs {
  double gaussian = 0.0;
  double bernoulli = 0.0;
  double categorical = 0.0;
  double total() const { return gaussian + bernoulli + categorical; }
};

inline constexpr double kLogStdMin = -5.0;
inline constexpr double kLogStdMax = 2.0;

/// Tape outputs for a batch of observations.
struct BatchHeads {
  Var mean;        // B x c
  Var log_std;     // 1 x c
  Var bern_logits; // B x b
  Var cat_logits;  // B x n
  Var value;       // B x 1
};

class ActorCritic {
 public:
  ActorCritic(std::size_t obs_dim, ActionSpec spec, std::size_t hidden, std::uint64_t seed,
              double init_log_std = -0.5, double init_bernoulli_logit = 0.0);

  const ActionSpec& spec() const { return spec_; }
  std::size_t obs_dim() const { return obs_dim_; }
  std::vector<Parameter*> parameters();
  std::vector<const Parameter*> parameters() const;

  BatchHeads forward(Tape& tape, const Matrix& obs);

  /// Samples every head (or takes means/argmax when `stochastic` is false).
  ActionSample act(const Vector& obs, bool stochastic, std::mt19937_64& rng) const;
  HeadLogProbs log_prob(const Vector& obs, const ActionSample& action) const;
  double value(const Vector& obs) const;

 private:
  struct Plain {
    Vector mean;
    Vector log_std;
    Vector bern;
    Vector cat;
  };
  Plain forward_plain(const Vector& obs) const;

  std::size_t obs_dim_;
  ActionSpec spec_;
  Parameter w1_, b1_, w2_, b2_;
  Parameter w_mu_, b_mu_, log_std_;
  Parameter w_bern_, b_bern_;
  Parameter w_cat_, b_cat_;
  Parameter v1_, c1_, v2_, c2_, v_out_, c_out_;
};

/// Tape expression for the joint log-probability of a batch of actions.
/// `raw` is B x c, `bits` B x b (0/1), `onehot` B x n.
Var joint_log_prob(const BatchHeads& heads, const Matrix& raw, const Matrix& bits,
                   const Matrix& onehot);
/// Per-sample entropy of the joint distribution, B x 1.
Var joint_entropy(const BatchHeads& heads);

}  // namespace risnoma::ppo
