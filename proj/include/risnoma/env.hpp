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
#include <functional>
#include <iosfwd>
#include <random>
#include <string>
#include <vector>

#include "risnoma/channel.hpp"
#include "risnoma/semantic.hpp"
#include "risnoma/slotopt.hpp"

namespace risnoma::env {

struct TrafficParams {
  double mean_arrival = 1.0;   // Kbit per slot per SU
  double std_ratio = 0.2;
};

struct RewardParams {
  double b_max = 3.0;          // Kbit
  double lambda = 0.1;         // per Kbit of windowed excess
  std::size_t window = 20;
  bool hinge = true;
};

struct EnvConfig {
  channel::Geometry geometry;
  channel::FadingParams fading;
  slotopt::SystemParams system;
  TrafficParams traffic;
  RewardParams reward;
  slotopt::ExtractionMode mode = slotopt::ExtractionMode::deferrable;
  std::size_t episode_length = 200;
  /// D and Z are squashed into [0, action_scale * mean_arrival].
  double action_scale = 2.0;

  std::size_t num_sus() const { return geometry.num_sus(); }
  double action_max() const { return action_scale * traffic.mean_arrival; }
};

/// Three SUs in a unit disc around (7, 3); RIS at (5, 0) with 70 elements.
EnvConfig default_config(std::size_t num_sus = 3);

void validate(const EnvConfig& config);

using Observation = std::vector<double>;

/// The part of a slot action chosen by the agent.
struct LearnedAction {
  std::vector<double> extract;   // D
  std::vector<double> request;   // Z
  std::vector<bool> transmit;    // psi
  int mode = 1;                  // m

  static LearnedAction idle(std::size_t num_sus, int mode = 1);
};

struct SlotRecord {
  std::size_t slot = 0;
  Observation observation;
  LearnedAction learned;
  std::vector<double> arrivals;
  std::vector<double> rho;
  std::vector<double> power;
  std::vector<double> capacity;
  std::vector<double> raw_backlog;
  std::vector<double> sem_backlog;
  std::vector<double> window_mean;
  double reward = 0.0;
  double eta_hat = 0.0;
  double penalty = 0.0;
  double energy = 0.0;
  double sum_capacity = 0.0;
  bool feasible = true;
  double optimizer_seconds = 0.0;
  /// Policy forward plus dispatch.
  double decision_seconds = 0.0;
};

struct EpisodeTrace {
  std::vector<SlotRecord> records;

  std::size_t size() const { return records.size(); }
  double mean_eta_hat() const;
  double mean_reward() const;
  /// Column order: slot, mode, reward, eta_hat, penalty, energy, sum_capacity,
  /// feasible, optimizer_seconds, decision_seconds, then per SU k the block arrival, extract,
  /// request, transmit, rho, power, capacity, raw, sem, window (suffixed _k),
  /// then obs_0 .. obs_{n-1}.
  void write_csv(std::ostream& out) const;
  void write_csv(const std::string& path) const;
};

struct StepResult {
  Observation observation;
  double reward = 0.0;
  bool done = false;
  SlotRecord record;
};

class Environment {
 public:
  explicit Environment(EnvConfig config);

  Observation reset(std::uint64_t seed);
  /// Applies the combined action, advances queues, redraws channels and arrivals.
  StepResult step(const LearnedAction& learned, const slotopt::OptimizedAction& optimized);

  /// The per-slot problem seen by the optimiser under `learned`.
  slotopt::SlotProblem problem(const LearnedAction& learned) const;
  LearnedAction sanitize(const LearnedAction& learned) const;

  Observation observe() const;
  std::size_t observation_size() const { return 4 * config_.num_sus() + 1; }

  const EnvConfig& config() const { return config_; }
  const channel::ChannelState& channels() const { return channels_; }
  const std::vector<semantic::QueuePair>& queues() const { return queues_; }
  const std::vector<double>& arrivals() const { return arrivals_; }
  std::size_t slot() const { return slot_; }

  /// Optimised variables carried from slot to slot.
  const slotopt::OptimizedAction& carried() const { return carried_; }
  void set_carried(slotopt::OptimizedAction action) { carried_ = std::move(action); }

 private:
  void draw_slot();

  EnvConfig config_;
  std::mt19937_64 rng_;
  channel::ChannelState channels_;
  std::vector<semantic::QueuePair> queues_;
  std::vector<double> arrivals_;
  slotopt::OptimizedAction carried_;
  std::size_t slot_ = 0;
};

using Policy = std::function<LearnedAction(const Observation&)>;

/// Closed loop policy -> dispatch -> step for `slots` slots from reset(seed).
EpisodeTrace run_policy(Environment& env, const Policy& policy, std::size_t slots,
                        std::uint64_t seed, slotopt::Profile profile = slotopt::Profile::exact);

}  // namespace risnoma::env
