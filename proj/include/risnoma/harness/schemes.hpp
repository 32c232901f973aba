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

#include <array>
#include <cstdint>
#include <memory>
#include <random>
#include <string>
#include <vector>

#include "risnoma/env.hpp"
#include "risnoma/harness/config.hpp"
#include "risnoma/ppo/ppo.hpp"
#include "risnoma/slotopt.hpp"

namespace risnoma::harness {

enum class Scheme {
  pdoo,
  pdoo_lightweight,
  all_selection,
  plain_ppo,
  realtime_extraction,
  random,
  alg1_greedy,
  fixed_phase,
  fixed_extraction,
  fixed_decoding,
  non_semantic,
  quantized_phase,
};

const std::vector<std::string>& scheme_names();
/// Throws std::invalid_argument listing the valid names.
Scheme parse_scheme(const std::string& name);
std::string to_string(Scheme scheme);
bool is_learning(Scheme scheme);
/// Schemes that run on the single-queue (real-time) environment.
bool is_realtime(Scheme scheme);

/// Environment settings for `scheme` under `config` (mode and cost overrides applied).
env::EnvConfig scheme_env_config(Scheme scheme, const ExperimentConfig& config);

/// Converts between network samples and environment actions.
class ActionCodec {
 public:
  ActionCodec(Scheme scheme, const env::EnvConfig& env);
  ppo::ActionSpec spec() const { return spec_; }
  env::LearnedAction learned(const ppo::ActionSample& sample) const;
  /// Direct optimised variables (Plain-PPO only).
  slotopt::OptimizedAction optimized(const ppo::ActionSample& sample) const;

 private:
  Scheme scheme_;
  std::size_t K_;
  std::size_t L_;
  double action_max_;
  double rho_min_;
  ppo::ActionSpec spec_;
};

struct Decision {
  env::LearnedAction learned;
  slotopt::OptimizedAction optimized;
  ppo::ActionSample sample;
  double optimizer_seconds = 0.0;
  double decision_seconds = 0.0;
  /// Retained eta per JTAC iteration (real-time optimiser schemes only).
  std::vector<double> convergence;
};

/// Produces one slot decision for a scheme.
class Controller {
 public:
  /// Takes ownership of an existing learner when `agent` is non-null.
  Controller(Scheme scheme, const ExperimentConfig& config, const env::EnvConfig& env,
             std::uint64_t seed, std::shared_ptr<ppo::PpoAgent> agent = nullptr);

  Decision decide(const env::Environment& env, bool stochastic);
  Scheme scheme() const { return scheme_; }
  ppo::PpoAgent* agent() { return agent_.get(); }
  std::shared_ptr<ppo::PpoAgent> shared_agent() const { return agent_; }
  const ActionCodec& codec() const { return codec_; }

 private:
  Scheme scheme_;
  slotopt::Profile profile_;
  std::size_t jtac_iters_;
  double jtac_eps_;
  ActionCodec codec_;
  std::shared_ptr<ppo::PpoAgent> agent_;
  std::mt19937_64 rng_;
};

struct TrainingResult {
  /// Mean per-slot reward of every completed training episode.
  std::vector<double> episode_rewards;
  std::vector<ppo::UpdateStats> updates;
};

/// On-policy training for `steps` environment steps. Episodes restart from
/// seeds drawn from `seed`.
TrainingResult train(Controller& controller, env::Environment& env, std::size_t steps,
                     std::uint64_t seed);

/// Runs whole episodes and concatenates their traces.
env::EpisodeTrace evaluate(Controller& controller, env::Environment& env, std::size_t episodes,
                           std::uint64_t seed, bool stochastic,
                           std::vector<double>* convergence = nullptr);

struct RunReport {
  std::string scheme;
  std::uint64_t seed = 0;
  double mean_eta_hat = 0.0;
  double mean_reward = 0.0;
  double mean_raw_backlog = 0.0;
  double mean_sem_backlog = 0.0;
  double mean_decision_seconds = 0.0;
  double mean_optimizer_seconds = 0.0;
  /// Share of (slot, SU) pairs whose windowed backlog is within b_max.
  double backlog_compliance = 0.0;
  /// Learning schemes: mean of the last (up to) 100 training episodes.
  /// Others: mean per-slot reward of the evaluation episodes.
  double trailing_reward = 0.0;
  std::vector<double> training_curve;
  std::vector<ppo::UpdateStats> updates;
  /// The trained learner, for learning schemes.
  std::shared_ptr<ppo::PpoAgent> agent;
  /// Mean retained eta per JTAC iteration, for optimiser-only schemes.
  std::vector<double> convergence;
  env::EpisodeTrace trace;
};

/// Summary statistics recomputed from a trace.
void summarize(const env::EpisodeTrace& trace, double b_max, RunReport& report);

/// Trains (when the scheme learns) and evaluates one scheme at `config.seed`.
RunReport run_scheme(const ExperimentConfig& config);

/// Parameters accepted by sweep: L, ris_x, arrival, K, noise.
const std::vector<std::string>& sweep_parameters();
void apply_sweep_value(ExperimentConfig& config, const std::string& parameter, double value);

struct SweepPoint {
  std::string parameter;
  double value = 0.0;
  /// One report per seed; seeds are shared across points.
  std::vector<RunReport> reports;
};

std::vector<SweepPoint> sweep(const ExperimentConfig& config, const std::string& parameter,
                              const std::vector<double>& values);

/// Mean per-step decision time (policy forward plus dispatch) over `slots`
/// slots of the untrained, seeded policy.
double bench(const ExperimentConfig& config, std::size_t slots, env::EpisodeTrace* trace = nullptr);

/// Selection frequency of modes 1..3; zeros for an empty trace.
std::array<double, 3> mode_histogram(const env::EpisodeTrace& trace);

}  // namespace risnoma::harness
