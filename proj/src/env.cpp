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

#include "risnoma/env.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <numeric>
#include <ostream>
#include <stdexcept>

namespace risnoma::env {

EnvConfig default_config(std::size_t num_sus) {
  EnvConfig c;
  c.geometry.sus = channel::scatter_sus(num_sus, {7.0, 3.0}, 1.0, 7);
  return c;
}

void validate(const EnvConfig& c) {
  channel::validate(c.geometry);
  semantic::validate(c.system.semantic);
  if (!(c.traffic.mean_arrival >= 0.0 && c.traffic.std_ratio >= 0.0))
    throw std::invalid_argument("env: arrival statistics must be non-negative");
  if (!(c.reward.b_max > 0.0) || c.reward.lambda < 0.0 || c.reward.window == 0)
    throw std::invalid_argument("env: invalid reward parameters");
  if (c.episode_length == 0) throw std::invalid_argument("env: episode length must be positive");
  if (!(c.action_scale > 0.0)) throw std::invalid_argument("env: action scale must be positive");
  if (!(c.system.radio.p_max > 0.0 && c.system.radio.noise_power > 0.0 &&
        c.system.radio.bandwidth > 0.0 && c.system.radio.slot_duration > 0.0))
    throw std::invalid_argument("env: radio parameters must be positive");
}

LearnedAction LearnedAction::idle(std::size_t n, int mode) {
  return {std::vector<double>(n, 0.0), std::vector<double>(n, 0.0), std::vector<bool>(n, false),
          mode};
}

double EpisodeTrace::mean_eta_hat() const {
  if (records.empty()) return 0.0;
  double s = 0.0;
  for (const auto& r : records) s += r.eta_hat;
  return s / static_cast<double>(records.size());
}

double EpisodeTrace::mean_reward() const {
  if (records.empty()) return 0.0;
  double s = 0.0;
  for (const auto& r : records) s += r.reward;
  return s / static_cast<double>(records.size());
}

void EpisodeTrace::write_csv(std::ostream& out) const {
  const std::size_t K = records.empty() ? 0 : records.front().arrivals.size();
  const std::size_t n_obs = records.empty() ? 0 : records.front().observation.size();
  out << "slot,mode,reward,eta_hat,penalty,energy,sum_capacity,feasible,optimizer_seconds,decision_seconds";
  for (std::size_t k = 0; k < K; ++k)
    for (const char* name : {"arrival", "extract", "request", "transmit", "rho", "power",
                             "capacity", "raw", "sem", "window"})
      out << ',' << name << '_' << k;
  for (std::size_t i = 0; i < n_obs; ++i) out << ",obs_" << i;
  out << '\n';
  out.precision(12);
  for (const auto& r : records) {
    out << r.slot << ',' << r.learned.mode << ',' << r.reward << ',' << r.eta_hat << ','
        << r.penalty << ',' << r.energy << ',' << r.sum_capacity << ',' << (r.feasible ? 1 : 0)
        << ',' << r.optimizer_seconds << ',' << r.decision_seconds;
    for (std::size_t k = 0; k < K; ++k)
      out << ',' << r.arrivals[k] << ',' << r.learned.extract[k] << ',' << r.learned.request[k]
          << ',' << (r.learned.transmit[k] ? 1 : 0) << ',' << r.rho[k] << ',' << r.power[k] << ','
          << r.capacity[k] << ',' << r.raw_backlog[k] << ',' << r.sem_backlog[k] << ','
          << r.window_mean[k];
    for (double o : r.observation) out << ',' << o;
    out << '\n';
  }
}

void EpisodeTrace::write_csv(const std::string& path) const {
  std::ofstream f(path);
  if (!f) throw std::runtime_error("cannot open " + path);
  write_csv(f);
}

Environment::Environment(EnvConfig config) : config_(std::move(config)) {
  validate(config_);
  reset(0);
}

void Environment::draw_slot() {
  channels_ = channel::sample_channels(config_.geometry, config_.fading, rng_());
  const double mean = config_.traffic.mean_arrival;
  std::normal_distribution<double> normal(mean, config_.traffic.std_ratio * mean);
  for (auto& a : arrivals_) a = mean > 0.0 ? std::max(normal(rng_), 0.0) : 0.0;
}

Observation Environment::reset(std::uint64_t seed) {
  const std::size_t K = config_.num_sus();
  rng_.seed(seed);
  slot_ = 0;
  queues_.assign(K, semantic::QueuePair{});
  for (auto& q : queues_) q.window_length = config_.reward.window;
  arrivals_.assign(K, 0.0);
  const double rho0 = 0.5 * (config_.system.semantic.rho_min + 1.0);
  carried_ = slotopt::OptimizedAction::initial(K, config_.geometry.ris_elements, rho0);
  draw_slot();
  return observe();
}

Observation Environment::observe() const {
  const std::size_t K = config_.num_sus();
  const auto gains = channel::equivalent_gains(channels_, carried_.phases);
  const double noise = config_.system.radio.noise_power;
  const double b_max = config_.reward.b_max;
  const double mean = config_.traffic.mean_arrival > 0.0 ? config_.traffic.mean_arrival : 1.0;
  Observation o;
  o.reserve(observation_size());
  for (std::size_t k = 0; k < K; ++k) o.push_back(std::log10(std::max(gains[k], 1e-300) / noise) / 10.0);
  for (std::size_t k = 0; k < K; ++k) o.push_back(std::log1p(queues_[k].raw_backlog / b_max));
  for (std::size_t k = 0; k < K; ++k) o.push_back(std::log1p(queues_[k].sem_backlog / b_max));
  for (std::size_t k = 0; k < K; ++k) o.push_back(arrivals_[k] / mean);
  o.push_back(static_cast<double>(slot_ % config_.episode_length) /
              static_cast<double>(config_.episode_length));
  return o;
}

LearnedAction Environment::sanitize(const LearnedAction& learned) const {
  const std::size_t K = config_.num_sus();
  if (learned.extract.size() != K || learned.request.size() != K || learned.transmit.size() != K)
    throw std::invalid_argument("LearnedAction: per-SU vectors must have K entries");
  LearnedAction l = learned;
  const double hi = config_.action_max();
  auto clip = [hi](double v) { return std::isfinite(v) ? std::clamp(v, 0.0, hi) : 0.0; };
  for (auto& v : l.extract) v = clip(v);
  for (auto& v : l.request) v = clip(v);
  l.mode = std::clamp(l.mode, 1, 3);
  return l;
}

slotopt::SlotProblem Environment::problem(const LearnedAction& learned) const {
  const std::size_t K = config_.num_sus();
  slotopt::SlotProblem p;
  p.channels = channels_;
  p.params = config_.system;
  p.mode = config_.mode;
  p.request = learned.request;
  p.raw_demand.resize(K);
  p.sem_backlog.assign(K, 0.0);
  if (config_.mode == slotopt::ExtractionMode::realtime) {
    p.active.assign(K, true);
    for (std::size_t k = 0; k < K; ++k) p.raw_demand[k] = queues_[k].raw_backlog + arrivals_[k];
  } else {
    p.active = learned.transmit;
    for (std::size_t k = 0; k < K; ++k) {
      p.raw_demand[k] = semantic::effective_extraction(queues_[k], arrivals_[k], learned.extract[k]);
      p.sem_backlog[k] = queues_[k].sem_backlog;
    }
  }
  return p;
}

StepResult Environment::step(const LearnedAction& learned, const slotopt::OptimizedAction& optimized) {
  const std::size_t K = config_.num_sus();
  const auto l = sanitize(learned);
  auto a = optimized;
  if (a.rho.size() != K || a.order.size() != K || a.phases.size() != config_.geometry.ris_elements)
    throw std::invalid_argument("step: optimized action has wrong dimensions");
  for (auto& r : a.rho)
    r = std::isfinite(r) ? std::clamp(r, config_.system.semantic.rho_min, 1.0) : 1.0;

  StepResult out;
  auto& rec = out.record;
  rec.slot = slot_;
  rec.observation = observe();
  rec.learned = l;
  rec.arrivals = arrivals_;

  const auto prob = problem(l);
  const auto ev = slotopt::evaluate(prob, a);

  for (std::size_t k = 0; k < K; ++k) {
    const double cap = ev.capacities[k];
    if (config_.mode == slotopt::ExtractionMode::realtime)
      queues_[k] = semantic::step_realtime_queue(queues_[k], arrivals_[k], cap, a.rho[k]);
    else
      queues_[k] = semantic::step_deferrable_queues(queues_[k], arrivals_[k], l.extract[k],
                                                    a.rho[k], cap);
    rec.penalty += semantic::delay_window_penalty(queues_[k], config_.reward.b_max,
                                                  config_.reward.lambda, config_.reward.hinge);
    rec.raw_backlog.push_back(queues_[k].raw_backlog);
    rec.sem_backlog.push_back(queues_[k].sem_backlog);
    rec.window_mean.push_back(queues_[k].window_mean());
  }
  rec.rho = a.rho;
  rec.power = ev.power.profile.power;
  rec.capacity = ev.capacities;
  rec.eta_hat = ev.eta_hat;
  rec.energy = ev.energy;
  rec.sum_capacity = std::accumulate(ev.capacities.begin(), ev.capacities.end(), 0.0);
  rec.feasible = ev.feasible;
  rec.reward = ev.eta_hat - rec.penalty;

  carried_ = std::move(a);
  ++slot_;
  draw_slot();
  out.observation = observe();
  out.reward = rec.reward;
  out.done = slot_ % config_.episode_length == 0;
  return out;
}

EpisodeTrace run_policy(Environment& env, const Policy& policy, std::size_t slots,
                        std::uint64_t seed, slotopt::Profile profile) {
  EpisodeTrace trace;
  trace.records.reserve(slots);
  auto obs = env.reset(seed);
  for (std::size_t t = 0; t < slots; ++t) {
    const auto t0 = std::chrono::steady_clock::now();
    const auto learned = env.sanitize(policy(obs));
    const auto start = std::chrono::steady_clock::now();
    const auto res = slotopt::dispatch(slotopt::choice_from_index(learned.mode),
                                       env.problem(learned), env.carried(), profile);
    const auto end = std::chrono::steady_clock::now();
    auto step = env.step(learned, res.action);
    step.record.optimizer_seconds = std::chrono::duration<double>(end - start).count();
    step.record.decision_seconds = std::chrono::duration<double>(end - t0).count();
    trace.records.push_back(std::move(step.record));
    obs = std::move(step.observation);
  }
  return trace;
}

}  // namespace risnoma::env
