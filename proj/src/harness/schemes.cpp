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

#include "risnoma/harness/schemes.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace risnoma::harness {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_between(Clock::time_point a, Clock::time_point b) {
  return std::chrono::duration<double>(b - a).count();
}

ppo::Vector to_vector(const env::Observation& o) {
  return Eigen::Map<const ppo::Vector>(o.data(), static_cast<Eigen::Index>(o.size()));
}

constexpr std::uint64_t kEvalSeedBase = 1000003;

}  // namespace

const std::vector<std::string>& scheme_names() {
  static const std::vector<std::string> names{
      "pdoo",           "pdoo-lightweight", "all-selection",    "plain-ppo",
      "realtime-extraction", "random",      "alg1-greedy",      "fixed-phase",
      "fixed-extraction", "fixed-decoding", "non-semantic",     "quantized-phase"};
  return names;
}

Scheme parse_scheme(const std::string& name) {
  const auto& names = scheme_names();
  const auto it = std::find(names.begin(), names.end(), name);
  if (it == names.end()) {
    std::string list;
    for (const auto& n : names) list += (list.empty() ? "" : ", ") + n;
    throw std::invalid_argument("unknown scheme '" + name + "'; choices: " + list);
  }
  return static_cast<Scheme>(it - names.begin());
}

std::string to_string(Scheme s) { return scheme_names()[static_cast<std::size_t>(s)]; }

bool is_learning(Scheme s) {
  switch (s) {
    case Scheme::pdoo:
    case Scheme::pdoo_lightweight:
    case Scheme::all_selection:
    case Scheme::plain_ppo:
    case Scheme::realtime_extraction:
      return true;
    default:
      return false;
  }
}

bool is_realtime(Scheme s) {
  switch (s) {
    case Scheme::realtime_extraction:
    case Scheme::alg1_greedy:
    case Scheme::fixed_phase:
    case Scheme::fixed_extraction:
    case Scheme::fixed_decoding:
    case Scheme::non_semantic:
    case Scheme::quantized_phase:
      return true;
    default:
      return false;
  }
}

env::EnvConfig scheme_env_config(Scheme scheme, const ExperimentConfig& config) {
  auto e = config.env_config();
  if (is_realtime(scheme))
    e.mode = slotopt::ExtractionMode::realtime;
  else if (scheme != Scheme::random)
    e.mode = slotopt::ExtractionMode::deferrable;
  if (scheme == Scheme::non_semantic) e.system.semantic.kappa = 0.0;
  return e;
}

// ---------------------------------------------------------------------------

ActionCodec::ActionCodec(Scheme scheme, const env::EnvConfig& env)
    : scheme_(scheme),
      K_(env.num_sus()),
      L_(env.geometry.ris_elements),
      action_max_(env.action_max()),
      rho_min_(env.system.semantic.rho_min) {
  switch (scheme) {
    case Scheme::pdoo:
    case Scheme::pdoo_lightweight:
    case Scheme::random:
      spec_ = {2 * K_, K_, 3};
      break;
    case Scheme::all_selection:
      spec_ = {2 * K_, K_, 0};
      break;
    case Scheme::plain_ppo:
      spec_ = {4 * K_ + L_, K_, 0};
      break;
    case Scheme::realtime_extraction:
      spec_ = {K_, 0, 3};
      break;
    default:
      spec_ = {0, 0, 0};
  }
}

env::LearnedAction ActionCodec::learned(const ppo::ActionSample& s) const {
  auto squash = [this](double u) { return action_max_ * ppo::sigmoid(u); };
  env::LearnedAction a = env::LearnedAction::idle(K_);
  if (scheme_ == Scheme::realtime_extraction) {
    for (std::size_t k = 0; k < K_; ++k) {
      a.request[k] = squash(s.continuous(k));
      a.transmit[k] = true;
    }
    a.mode = s.category + 1;
    return a;
  }
  for (std::size_t k = 0; k < K_; ++k) {
    a.extract[k] = squash(s.continuous(k));
    a.request[k] = squash(s.continuous(K_ + k));
    a.transmit[k] = s.bits[k] != 0;
  }
  a.mode = spec_.categories ? s.category + 1 : 1;
  return a;
}

slotopt::OptimizedAction ActionCodec::optimized(const ppo::ActionSample& s) const {
  if (scheme_ != Scheme::plain_ppo) throw std::logic_error("ActionCodec: only Plain-PPO emits optimised variables");
  slotopt::OptimizedAction a;
  a.rho.resize(K_);
  std::vector<double> priority(K_);
  for (std::size_t k = 0; k < K_; ++k) {
    a.rho[k] = rho_min_ + (1.0 - rho_min_) * ppo::sigmoid(s.continuous(2 * K_ + k));
    priority[k] = s.continuous(3 * K_ + k);
  }
  a.order = noma::order_from_priorities(priority);
  std::vector<double> phases(L_);
  for (std::size_t l = 0; l < L_; ++l) phases[l] = kTwoPi * ppo::sigmoid(s.continuous(4 * K_ + l));
  a.phases = channel::PhaseVector(std::move(phases));
  return a;
}

// ---------------------------------------------------------------------------

Controller::Controller(Scheme scheme, const ExperimentConfig& config, const env::EnvConfig& env,
                       std::uint64_t seed, std::shared_ptr<ppo::PpoAgent> agent)
    : scheme_(scheme),
      profile_(scheme == Scheme::pdoo_lightweight ? slotopt::Profile::lightweight : config.profile),
      jtac_iters_(config.jtac_iters),
      jtac_eps_(config.jtac_eps),
      codec_(scheme, env),
      agent_(std::move(agent)),
      rng_(seed) {
  if (is_learning(scheme) && !agent_)
    agent_ = std::make_shared<ppo::PpoAgent>(4 * env.num_sus() + 1, codec_.spec(), config.ppo, seed);
}

Decision Controller::decide(const env::Environment& env, bool stochastic) {
  const std::size_t K = env.config().num_sus();
  Decision d;
  const auto t0 = Clock::now();
  auto obs = env.observe();
  if (agent_) {
    d.sample = agent_->act(to_vector(obs), stochastic);
    d.learned = env.sanitize(codec_.learned(d.sample));
  } else if (scheme_ == Scheme::random) {
    std::uniform_real_distribution<double> size(0.0, env.config().action_max());
    std::bernoulli_distribution coin(0.5);
    std::uniform_int_distribution<int> mode(1, 3);
    d.learned = env::LearnedAction::idle(K);
    for (std::size_t k = 0; k < K; ++k) {
      d.learned.extract[k] = size(rng_);
      d.learned.request[k] = size(rng_);
      d.learned.transmit[k] = coin(rng_);
    }
    d.learned.mode = mode(rng_);
  } else {
    d.learned = env::LearnedAction::idle(K);
    d.learned.transmit.assign(K, true);
  }

  const auto t1 = Clock::now();
  switch (scheme_) {
    case Scheme::pdoo:
    case Scheme::pdoo_lightweight:
    case Scheme::realtime_extraction:
    case Scheme::random:
      d.optimized = slotopt::dispatch(slotopt::choice_from_index(d.learned.mode),
                                      env.problem(d.learned), env.carried(), profile_)
                        .action;
      break;
    case Scheme::all_selection:
      d.optimized = slotopt::dispatch_all(env.problem(d.learned), env.carried(), profile_).action;
      break;
    case Scheme::plain_ppo:
      d.optimized = codec_.optimized(d.sample);
      break;
    default: {
      slotopt::JtacOptions opt;
      const auto& ec = env.config();
      auto init = slotopt::OptimizedAction::initial(
          K, ec.geometry.ris_elements, 0.5 * (ec.system.semantic.rho_min + 1.0));
      if (scheme_ == Scheme::fixed_phase) opt.optimize_phases = false;
      if (scheme_ == Scheme::fixed_extraction) opt.optimize_rho = false;
      if (scheme_ == Scheme::fixed_decoding) opt.optimize_order = false;
      if (scheme_ == Scheme::quantized_phase) opt.quantize_bits = 2;
      if (scheme_ == Scheme::non_semantic) {
        opt.optimize_rho = false;
        init.rho.assign(K, 1.0);
      }
      auto res = slotopt::jtac_alternating(env.problem(d.learned), jtac_eps_, jtac_iters_, opt, &init);
      d.optimized = std::move(res.action);
      d.convergence = std::move(res.eta_trace);
      d.convergence.resize(jtac_iters_ + 1, d.convergence.back());
    }
  }
  const auto t2 = Clock::now();
  d.optimizer_seconds = seconds_between(t1, t2);
  d.decision_seconds = seconds_between(t0, t2);
  return d;
}

// ---------------------------------------------------------------------------

TrainingResult train(Controller& controller, env::Environment& env, std::size_t steps,
                     std::uint64_t seed) {
  auto* agent = controller.agent();
  if (!agent) throw std::logic_error("train: scheme has no learner");
  TrainingResult out;
  ppo::RolloutBuffer buffer(agent->config().buffer_capacity);
  std::mt19937_64 episode_seeds(seed);
  env.reset(episode_seeds());
  double ep_sum = 0.0;
  std::size_t ep_len = 0;
  for (std::size_t s = 0; s < steps; ++s) {
    auto d = controller.decide(env, true);
    auto obs = to_vector(env.observe());
    auto res = env.step(d.learned, d.optimized);
    buffer.push({std::move(obs), std::move(d.sample), agent->shape_reward(res.reward, res.done), res.done});
    ep_sum += res.reward;
    ++ep_len;
    if (res.done) {
      out.episode_rewards.push_back(ep_sum / static_cast<double>(ep_len));
      ep_sum = 0.0;
      ep_len = 0;
      env.reset(episode_seeds());
    }
    if (buffer.full()) out.updates.push_back(agent->update(buffer, agent->value(to_vector(env.observe()))));
  }
  return out;
}

env::EpisodeTrace evaluate(Controller& controller, env::Environment& env, std::size_t episodes,
                           std::uint64_t seed, bool stochastic, std::vector<double>* convergence) {
  env::EpisodeTrace trace;
  std::size_t n_conv = 0;
  for (std::size_t e = 0; e < episodes; ++e) {
    env.reset(seed + e);
    for (std::size_t t = 0; t < env.config().episode_length; ++t) {
      auto d = controller.decide(env, stochastic);
      auto res = env.step(d.learned, d.optimized);
      res.record.optimizer_seconds = d.optimizer_seconds;
      res.record.decision_seconds = d.decision_seconds;
      trace.records.push_back(std::move(res.record));
      if (convergence && !d.convergence.empty()) {
        if (convergence->size() < d.convergence.size()) convergence->resize(d.convergence.size(), 0.0);
        for (std::size_t i = 0; i < d.convergence.size(); ++i) (*convergence)[i] += d.convergence[i];
        ++n_conv;
      }
    }
  }
  if (convergence && n_conv)
    for (auto& v : *convergence) v /= static_cast<double>(n_conv);
  return trace;
}

void summarize(const env::EpisodeTrace& trace, double b_max, RunReport& r) {
  const double n = static_cast<double>(trace.size());
  r.mean_eta_hat = trace.mean_eta_hat();
  r.mean_reward = trace.mean_reward();
  r.mean_raw_backlog = r.mean_sem_backlog = r.mean_decision_seconds = r.mean_optimizer_seconds = 0.0;
  r.backlog_compliance = 0.0;
  if (trace.records.empty()) return;
  std::size_t pairs = 0, within = 0;
  for (const auto& rec : trace.records) {
    const double K = static_cast<double>(rec.raw_backlog.size());
    r.mean_raw_backlog += std::accumulate(rec.raw_backlog.begin(), rec.raw_backlog.end(), 0.0) / K;
    r.mean_sem_backlog += std::accumulate(rec.sem_backlog.begin(), rec.sem_backlog.end(), 0.0) / K;
    r.mean_decision_seconds += rec.decision_seconds;
    r.mean_optimizer_seconds += rec.optimizer_seconds;
    for (double w : rec.window_mean) {
      ++pairs;
      within += w <= b_max ? 1 : 0;
    }
  }
  r.mean_raw_backlog /= n;
  r.mean_sem_backlog /= n;
  r.mean_decision_seconds /= n;
  r.mean_optimizer_seconds /= n;
  r.backlog_compliance = static_cast<double>(within) / static_cast<double>(pairs);
}

RunReport run_scheme(const ExperimentConfig& config) {
  const Scheme scheme = parse_scheme(config.scheme);
  const auto ec = scheme_env_config(scheme, config);
  env::Environment env(ec);
  Controller controller(scheme, config, ec, config.seed);
  RunReport report;
  report.scheme = config.scheme;
  report.seed = config.seed;
  if (is_learning(scheme)) {
    auto tr = train(controller, env, config.train_steps, config.seed * 7919 + 17);
    report.training_curve = std::move(tr.episode_rewards);
    report.updates = std::move(tr.updates);
    report.agent = controller.shared_agent();
  }
  report.trace = evaluate(controller, env, config.eval_episodes, kEvalSeedBase + 1000 * config.seed,
                          config.stochastic_eval, &report.convergence);
  summarize(report.trace, ec.reward.b_max, report);
  if (!report.training_curve.empty()) {
    const auto& c = report.training_curve;
    const std::size_t n = std::min<std::size_t>(100, c.size());
    report.trailing_reward = std::accumulate(c.end() - static_cast<std::ptrdiff_t>(n), c.end(), 0.0) / n;
  } else {
    report.trailing_reward = report.mean_reward;
  }
  return report;
}

// ---------------------------------------------------------------------------

const std::vector<std::string>& sweep_parameters() {
  static const std::vector<std::string> p{"L", "ris_x", "arrival", "K", "noise"};
  return p;
}

void apply_sweep_value(ExperimentConfig& c, const std::string& parameter, double value) {
  auto as_count = [&](double v) {
    if (v < 1.0 || v != std::floor(v)) throw std::invalid_argument("sweep: " + parameter + " needs a positive integer");
    return static_cast<std::size_t>(v);
  };
  if (parameter == "L")
    c.ris_elements = as_count(value);
  else if (parameter == "ris_x")
    c.ris_x = value;
  else if (parameter == "arrival")
    c.traffic.mean_arrival = value;
  else if (parameter == "K")
    c.num_sus = as_count(value);
  else if (parameter == "noise")
    c.noise_dbm = value;
  else
    throw std::invalid_argument("sweep: '" + parameter + "' is not sweepable (L, ris_x, arrival, K, noise)");
}

std::vector<SweepPoint> sweep(const ExperimentConfig& config, const std::string& parameter,
                              const std::vector<double>& values) {
  std::vector<SweepPoint> out;
  for (double v : values) {
    SweepPoint p{parameter, v, {}};
    for (std::size_t i = 0; i < config.seeds; ++i) {
      ExperimentConfig c = config;
      apply_sweep_value(c, parameter, v);
      c.seed = config.seed + i;
      p.reports.push_back(run_scheme(c));
    }
    out.push_back(std::move(p));
  }
  return out;
}

double bench(const ExperimentConfig& config, std::size_t slots, env::EpisodeTrace* trace) {
  const Scheme scheme = parse_scheme(config.scheme);
  const auto ec = scheme_env_config(scheme, config);
  env::Environment env(ec);
  Controller controller(scheme, config, ec, config.seed);
  env.reset(config.seed);
  double total = 0.0;
  for (std::size_t t = 0; t < slots; ++t) {
    auto d = controller.decide(env, true);
    total += d.decision_seconds;
    auto res = env.step(d.learned, d.optimized);
    if (trace) {
      res.record.optimizer_seconds = d.optimizer_seconds;
      res.record.decision_seconds = d.decision_seconds;
      trace->records.push_back(std::move(res.record));
    }
  }
  return slots ? total / static_cast<double>(slots) : 0.0;
}

std::array<double, 3> mode_histogram(const env::EpisodeTrace& trace) {
  std::array<double, 3> h{0.0, 0.0, 0.0};
  if (trace.records.empty()) return h;
  for (const auto& r : trace.records) h[static_cast<std::size_t>(std::clamp(r.learned.mode, 1, 3) - 1)] += 1.0;
  for (auto& v : h) v /= static_cast<double>(trace.size());
  return h;
}

}  // namespace risnoma::harness
