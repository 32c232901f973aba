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

#include "risnoma/slotopt.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

#include <spdlog/spdlog.h>

namespace risnoma::slotopt {

namespace {

constexpr double kContentFloor = 1e-9;

void check_problem(const SlotProblem& p) {
  const std::size_t K = p.num_sus();
  if (p.active.size() != K || p.raw_demand.size() != K)
    throw std::invalid_argument("SlotProblem: per-SU vectors must match the channel");
  if (p.mode == ExtractionMode::deferrable && (p.sem_backlog.size() != K || p.request.size() != K))
    throw std::invalid_argument("SlotProblem: deferrable mode needs backlog and request per SU");
}

void check_rho(const SlotProblem& p, std::span<const double> rho) {
  if (rho.size() != p.num_sus()) throw std::invalid_argument("SlotProblem: rho length mismatch");
}

double sem_backlog_of(const SlotProblem& p, std::size_t k) {
  return p.sem_backlog.empty() ? 0.0 : p.sem_backlog[k];
}

std::size_t largest_backlog_su(const SlotProblem& p) {
  std::size_t best = 0;
  double best_value = -1.0;
  for (std::size_t k = 0; k < p.num_sus(); ++k) {
    if (!p.active[k]) continue;
    const double v = p.mode == ExtractionMode::deferrable ? sem_backlog_of(p, k) : p.raw_demand[k];
    if (v > best_value) {
      best_value = v;
      best = k;
    }
  }
  return best;
}

// Received powers that exactly meet the targets, ignoring the power cap.
std::vector<double> required_received_power(const SlotProblem& problem,
                                            const noma::DecodingOrder& order,
                                            std::span<const double> rho) {
  const auto sched = problem.schedule(rho);
  const auto targets = problem.targets(rho);
  const auto& radio = problem.params.radio;
  std::vector<double> q(problem.num_sus(), 0.0);
  double later = 0.0;
  const auto& seq = order.sequence();
  for (auto it = seq.rbegin(); it != seq.rend(); ++it) {
    const std::size_t k = *it;
    if (!sched[k]) continue;
    const double omega = noma::sinr_threshold(std::max(targets[k], radio.s_min), radio);
    q[k] = omega * (later + radio.noise_power);
    later += q[k];
  }
  return q;
}

}  // namespace

OptimizerChoice choice_from_index(int m) {
  if (m < 1 || m > 3) throw std::invalid_argument("optimizer choice must be 1, 2 or 3");
  return static_cast<OptimizerChoice>(m);
}

std::vector<double> SlotProblem::content(std::span<const double> rho) const {
  check_problem(*this);
  check_rho(*this, rho);
  std::vector<double> c(num_sus());
  for (std::size_t k = 0; k < c.size(); ++k) {
    c[k] = rho[k] * raw_demand[k];
    if (mode == ExtractionMode::deferrable) c[k] += sem_backlog[k];
  }
  return c;
}

std::vector<double> SlotProblem::targets(std::span<const double> rho) const {
  auto t = content(rho);
  if (mode == ExtractionMode::deferrable)
    for (std::size_t k = 0; k < t.size(); ++k) t[k] = std::min(std::max(request[k], 0.0), t[k]);
  return t;
}

std::vector<bool> SlotProblem::schedule(std::span<const double> rho) const {
  const auto c = content(rho);
  std::vector<bool> s(c.size());
  for (std::size_t k = 0; k < c.size(); ++k) s[k] = active[k] && c[k] > kContentFloor;
  return s;
}

OptimizedAction OptimizedAction::initial(std::size_t num_sus, std::size_t num_elements,
                                         double rho) {
  return {std::vector<double>(num_sus, rho), noma::DecodingOrder::identity(num_sus),
          channel::PhaseVector::constant(num_elements, 0.0)};
}

Evaluation evaluate(const SlotProblem& problem, const OptimizedAction& action) {
  const auto gains = channel::equivalent_gains(problem.channels, action.phases);
  return evaluate(problem, gains, action);
}

Evaluation evaluate(const SlotProblem& problem, std::span<const double> gains,
                    const OptimizedAction& action) {
  check_problem(problem);
  check_rho(problem, action.rho);
  const auto& radio = problem.params.radio;
  const auto content = problem.content(action.rho);
  const auto targets = problem.targets(action.rho);
  const auto sched = problem.schedule(action.rho);

  Evaluation ev;
  ev.gains.assign(gains.begin(), gains.end());
  ev.power = noma::min_power_for_targets(gains, action.order, targets, sched, radio);
  ev.feasible = ev.power.feasible;
  ev.capacities = noma::su_capacities(gains, ev.power.profile, action.order, radio);
  ev.delivered.assign(gains.size(), 0.0);

  double sem_bits = 0.0;
  double raw_bits = 0.0;
  for (std::size_t k = 0; k < gains.size(); ++k) {
    if (!sched[k]) continue;
    ev.delivered[k] = std::min(ev.capacities[k], content[k]);
    sem_bits += ev.capacities[k];
    raw_bits += ev.delivered[k] / action.rho[k];
    ev.energy += semantic::semantic_energy(ev.capacities[k], action.rho[k], problem.params.semantic) +
                 radio.slot_duration * ev.power.profile.power[k];
  }
  if (ev.energy > 0.0) {
    ev.eta = sem_bits / ev.energy;
    ev.eta_hat = raw_bits / ev.energy;
  }
  return ev;
}

bool better(const Evaluation& a, const Evaluation& b, bool use_eta_hat) {
  if (a.feasible != b.feasible) return a.feasible;
  if (!a.feasible && a.power.violation != b.power.violation)
    return a.power.violation < b.power.violation;
  return use_eta_hat ? a.eta_hat > b.eta_hat : a.eta > b.eta;
}

// ---------------------------------------------------------------------------

OrderSearch best_order_bruteforce(const SlotProblem& problem, std::span<const double> gains,
                                  std::span<const double> rho) {
  const auto sched = problem.schedule(rho);
  const auto targets = problem.targets(rho);
  std::vector<std::size_t> on, off;
  for (std::size_t k = 0; k < sched.size(); ++k) (sched[k] ? on : off).push_back(k);
  if (on.size() > 8) throw std::invalid_argument("best_order_bruteforce: more than 8 scheduled SUs");

  OrderSearch best;
  bool have = false;
  do {
    std::vector<std::size_t> seq = on;
    seq.insert(seq.end(), off.begin(), off.end());
    auto order = noma::DecodingOrder::from_sequence(std::move(seq));
    const auto pc = noma::min_power_for_targets(gains, order, targets, sched, problem.params.radio);
    const double total = pc.total_power();
    bool take = !have;
    if (have) {
      if (pc.feasible != best.feasible)
        take = pc.feasible;
      else if (pc.feasible)
        take = total < best.sum_power;
      else
        take = pc.violation < best.violation;
    }
    if (take) {
      best = {std::move(order), pc.feasible, total, pc.violation};
      have = true;
    }
  } while (std::next_permutation(on.begin(), on.end()));
  return best;
}

noma::DecodingOrder heuristic_order_by_gain(std::span<const double> gains) {
  std::vector<double> priority(gains.size());
  std::transform(gains.begin(), gains.end(), priority.begin(), [](double g) { return -g; });
  return noma::order_from_priorities(priority);
}

RelaxationResult penalized_order_relaxation(std::span<const double> gains,
                                            std::span<const double> powers,
                                            const std::vector<bool>& active,
                                            const RelaxationOptions& options) {
  const std::size_t K = gains.size();
  if (powers.size() != K || active.size() != K)
    throw std::invalid_argument("penalized_order_relaxation: dimension mismatch");
  if (options.zeta_schedule.empty() || options.steps == 0)
    throw std::invalid_argument("penalized_order_relaxation: empty schedule");

  RelaxationResult out;
  std::vector<double> q(K, 0.0);
  double q_max = 0.0;
  for (std::size_t k = 0; k < K; ++k) {
    if (active[k]) q[k] = gains[k] * powers[k];
    q_max = std::max(q_max, q[k]);
  }
  auto fallback = [&](const char* why) {
    spdlog::warn("order relaxation: {}; using gain order", why);
    out.order = heuristic_order_by_gain(gains);
    out.fell_back = true;
    return out;
  };
  if (!(q_max > 0.0)) return fallback("no received power");
  for (auto& v : q) v /= q_max;

  using Matrix = std::vector<std::vector<double>>;
  Matrix x(K, std::vector<double>(K, 0.0));
  for (std::size_t k = 0; k < K; ++k)
    for (std::size_t kp = 0; kp < K; ++kp)
      if (k != kp && active[k] && active[kp]) x[k][kp] = 0.5;

  auto penalty = [&](const Matrix& m) {
    double e = 0.0;
    for (std::size_t k = 0; k < K; ++k)
      for (std::size_t kp = 0; kp < K; ++kp) {
        if (k == kp || !active[k] || !active[kp]) continue;
        e += linearized_binary_penalty(m[k][kp], m[k][kp]);
        if (k < kp) e += std::pow(m[k][kp] + m[kp][k] - 1.0, 2);
      }
    return e;
  };

  double last_move = std::numeric_limits<double>::infinity();
  for (double zeta : options.zeta_schedule) {
    const double step = 1.0 / (4.0 * zeta + 1.0);
    for (unsigned it = 0; it < options.steps; ++it) {
      const Matrix x0 = x;
      last_move = 0.0;
      for (std::size_t k = 0; k < K; ++k)
        for (std::size_t kp = 0; kp < K; ++kp) {
          if (k == kp || !active[k] || !active[kp]) continue;
          const double grad = -q[kp] - zeta * ((1.0 - 2.0 * x0[k][kp]) +
                                               2.0 * (x0[k][kp] + x0[kp][k] - 1.0));
          x[k][kp] = std::clamp(x0[k][kp] + step * grad, 0.0, 1.0);
          last_move = std::max(last_move, std::abs(x[k][kp] - x0[k][kp]));
        }
    }
    out.penalty_trace.push_back(penalty(x));
  }
  out.pi = x;
  out.converged = last_move <= options.tolerance;
  if (!out.converged) return fallback("did not converge");

  // More precedences means earlier decoding.
  std::vector<double> score(K, 0.0), soft(K, 0.0);
  for (std::size_t k = 0; k < K; ++k)
    for (std::size_t kp = 0; kp < K; ++kp) {
      score[k] += std::round(x[k][kp]);
      soft[k] += x[k][kp];
    }
  std::vector<std::size_t> seq(K);
  std::iota(seq.begin(), seq.end(), 0);
  std::stable_sort(seq.begin(), seq.end(), [&](std::size_t a, std::size_t b) {
    if (active[a] != active[b]) return static_cast<bool>(active[a]);
    if (score[a] != score[b]) return score[a] > score[b];
    return soft[a] > soft[b];
  });
  out.order = noma::DecodingOrder::from_sequence(std::move(seq));
  return out;
}

// ---------------------------------------------------------------------------

GainObjective slack_objective(const SlotProblem& problem, const noma::DecodingOrder& order,
                              std::span<const double> powers, std::span<const double> rho) {
  const auto sched = problem.schedule(rho);
  const auto targets = problem.targets(rho);
  const auto& radio = problem.params.radio;
  if (powers.size() != sched.size()) throw std::invalid_argument("slack_objective: power length");
  std::vector<double> omega(sched.size(), 0.0);
  for (std::size_t k = 0; k < sched.size(); ++k)
    if (sched[k]) omega[k] = noma::sinr_threshold(std::max(targets[k], radio.s_min), radio);
  std::vector<double> p(powers.begin(), powers.end());
  const double noise = radio.noise_power;
  return [sched, omega, p, order, noise](std::span<const double> g) {
    double total = 0.0;
    for (std::size_t k = 0; k < g.size(); ++k) {
      if (!sched[k]) continue;
      double interference = 0.0;
      for (std::size_t kp = 0; kp < g.size(); ++kp)
        if (sched[kp] && order.pi(k, kp)) interference += g[kp] * p[kp];
      total += (g[k] * p[k] / omega[k] - interference - noise) / noise;
    }
    return total;
  };
}

GainObjective transmit_power_objective(const SlotProblem& problem,
                                       const noma::DecodingOrder& order,
                                       std::span<const double> rho) {
  const auto q = required_received_power(problem, order, rho);
  return [q](std::span<const double> g) {
    double total = 0.0;
    for (std::size_t k = 0; k < g.size(); ++k) {
      if (q[k] == 0.0) continue;
      if (!(g[k] > 0.0)) return -std::numeric_limits<double>::max();
      total += q[k] / g[k];
    }
    return -total;
  };
}

PhaseSearch phases_coordinate_ascent(const channel::ChannelState& channels,
                                     const channel::PhaseVector& init, unsigned sweeps,
                                     const GainObjective& objective, unsigned levels) {
  const std::size_t K = channels.num_sus();
  const std::size_t L = channels.num_elements();
  if (init.size() != L) throw std::invalid_argument("phases_coordinate_ascent: phase length");
  if (levels == 0) throw std::invalid_argument("phases_coordinate_ascent: zero levels");

  std::vector<cplx> grid(levels);
  for (unsigned i = 0; i < levels; ++i) grid[i] = std::polar(1.0, kTwoPi * i / levels);

  PhaseSearch out{init, {}};
  auto h = channel::compose_equivalent(channels, init);
  std::vector<double> g(K);
  for (std::size_t k = 0; k < K; ++k) g[k] = std::norm(h[k]);
  double current = objective(g);
  out.trace.push_back(current);

  std::vector<cplx> rest(K);
  for (unsigned s = 0; s < sweeps; ++s) {
    for (std::size_t l = 0; l < L; ++l) {
      const cplx now = std::polar(1.0, out.phases[l]);
      for (std::size_t k = 0; k < K; ++k) rest[k] = h[k] - channels.cascade[k][l] * now;
      int best = -1;
      double best_value = current;
      for (unsigned i = 0; i < levels; ++i) {
        for (std::size_t k = 0; k < K; ++k) g[k] = std::norm(rest[k] + channels.cascade[k][l] * grid[i]);
        const double v = objective(g);
        if (v > best_value) {
          best_value = v;
          best = static_cast<int>(i);
        }
      }
      if (best >= 0) {
        out.phases.set(l, kTwoPi * best / levels);
        for (std::size_t k = 0; k < K; ++k) h[k] = rest[k] + channels.cascade[k][l] * grid[best];
        current = best_value;
      }
      out.trace.push_back(current);
    }
  }
  return out;
}

PhaseSearch phases_coordinate_ascent(const SlotProblem& problem, const OptimizedAction& action,
                                     std::span<const double> powers, unsigned sweeps) {
  return phases_coordinate_ascent(problem.channels, action.phases, sweeps,
                                  slack_objective(problem, action.order, powers, action.rho));
}

// ---------------------------------------------------------------------------

namespace {

channel::PhaseVector optimize_phases(const SlotProblem& problem, const OptimizedAction& a,
                                     Profile profile, unsigned sweeps) {
  if (profile == Profile::lightweight)
    return channel::aligned_phases(problem.channels, largest_backlog_su(problem));
  return phases_coordinate_ascent(problem.channels, a.phases, sweeps,
                                  transmit_power_objective(problem, a.order, a.rho))
      .phases;
}

noma::DecodingOrder optimize_order(const SlotProblem& problem, std::span<const double> gains,
                                   const OptimizedAction& a, Profile profile) {
  if (profile == Profile::lightweight) return heuristic_order_by_gain(gains);
  return best_order_bruteforce(problem, gains, a.rho).order;
}

// Per-SU line search over the depth grid, scored on eta with powers refreshed.
void search_rho(const SlotProblem& problem, std::span<const double> gains, OptimizedAction& a,
                Evaluation& ev, unsigned levels) {
  const double rmin = problem.params.semantic.rho_min;
  for (std::size_t k = 0; k < a.rho.size(); ++k) {
    if (!problem.active[k]) continue;
    const double keep = a.rho[k];
    double best_rho = keep;
    for (unsigned i = 0; i < levels; ++i) {
      const double r = levels == 1 ? 1.0 : rmin + (1.0 - rmin) * i / (levels - 1);
      a.rho[k] = r;
      auto cand = evaluate(problem, gains, a);
      if (better(cand, ev)) {
        ev = std::move(cand);
        best_rho = r;
      }
    }
    a.rho[k] = best_rho;
  }
}

}  // namespace

JtacResult jtac_alternating(const SlotProblem& problem, double eps, std::size_t max_iters,
                            const JtacOptions& options, const OptimizedAction* init) {
  check_problem(problem);
  const double rho0 = 0.5 * (problem.params.semantic.rho_min + 1.0);
  OptimizedAction cur =
      init ? *init
           : OptimizedAction::initial(problem.num_sus(), problem.channels.num_elements(), rho0);
  if (options.quantize_bits) cur.phases = channel::quantize_phases(cur.phases, options.quantize_bits);

  JtacResult out;
  out.action = cur;
  out.evaluation = evaluate(problem, cur);
  out.eta_trace.push_back(out.evaluation.eta);

  for (std::size_t it = 1; it <= max_iters; ++it) {
    auto gains = channel::equivalent_gains(problem.channels, cur.phases);
    if (options.optimize_order) cur.order = optimize_order(problem, gains, cur, options.profile);
    if (options.optimize_phases) {
      cur.phases = optimize_phases(problem, cur, options.profile, options.phase_sweeps);
      if (options.quantize_bits)
        cur.phases = channel::quantize_phases(cur.phases, options.quantize_bits);
      gains = channel::equivalent_gains(problem.channels, cur.phases);
    }
    auto ev = evaluate(problem, gains, cur);
    if (options.optimize_rho) search_rho(problem, gains, cur, ev, options.rho_levels);

    const double previous = out.evaluation.eta;
    if (better(ev, out.evaluation)) {
      out.action = cur;
      out.evaluation = std::move(ev);
    }
    out.eta_trace.push_back(out.evaluation.eta);
    out.iterations = it;
    if (std::abs(out.evaluation.eta - previous) <= eps) {
      out.converged = true;
      break;
    }
  }
  return out;
}

DispatchResult dispatch(OptimizerChoice choice, const SlotProblem& problem,
                        const OptimizedAction& current, Profile profile) {
  check_problem(problem);
  DispatchResult out{current, {}, 0};
  auto& a = out.action;
  switch (choice) {
    case OptimizerChoice::extraction: {
      if (problem.request.size() == problem.num_sus()) {
        for (std::size_t k = 0; k < a.rho.size(); ++k)
          if (problem.raw_demand[k] > 0.0)
            a.rho[k] = semantic::closed_form_rho(std::max(problem.request[k], 0.0),
                                                 problem.raw_demand[k],
                                                 problem.params.semantic.rho_min);
      }
      break;
    }
    case OptimizerChoice::beamforming:
      out.alignment_target = largest_backlog_su(problem);
      a.phases = optimize_phases(problem, a, profile, 2);
      break;
    case OptimizerChoice::decoding: {
      const auto gains = channel::equivalent_gains(problem.channels, a.phases);
      a.order = optimize_order(problem, gains, a, profile);
      break;
    }
  }
  out.evaluation = evaluate(problem, a);
  return out;
}

DispatchResult dispatch_all(const SlotProblem& problem, const OptimizedAction& current,
                            Profile profile, unsigned rounds, double eps) {
  DispatchResult best{current, evaluate(problem, current), 0};
  OptimizedAction cur = current;
  for (unsigned r = 0; r < rounds; ++r) {
    const double before = best.evaluation.eta_hat;
    for (int m = 1; m <= 3; ++m) {
      auto res = dispatch(choice_from_index(m), problem, cur, profile);
      cur = res.action;
      if (better(res.evaluation, best.evaluation, true)) best = std::move(res);
    }
    if (best.evaluation.eta_hat - before <= eps) break;
  }
  return best;
}

}  // namespace risnoma::slotopt
