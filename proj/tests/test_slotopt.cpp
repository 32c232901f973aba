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

#include <doctest.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>
#include <random>
#include <stdexcept>

#include "risnoma/env.hpp"
#include "risnoma/slotopt.hpp"

using namespace risnoma;
using namespace risnoma::slotopt;

namespace {

SlotProblem realtime_problem(std::uint64_t seed, std::size_t K = 3, std::size_t L = 16,
                             double demand = 1.0) {
  auto cfg = env::default_config(K);
  cfg.geometry.ris_elements = L;
  SlotProblem p;
  p.channels = channel::sample_channels(cfg.geometry, cfg.fading, seed);
  p.params = cfg.system;
  p.mode = ExtractionMode::realtime;
  p.active.assign(K, true);
  p.raw_demand.assign(K, demand);
  return p;
}

SlotProblem deferrable_problem(std::uint64_t seed, std::size_t K = 3, std::size_t L = 16) {
  auto p = realtime_problem(seed, K, L);
  p.mode = ExtractionMode::deferrable;
  p.sem_backlog = {0.5, 0.0, 2.0};
  p.request = {0.4, 1.5, 0.8};
  p.raw_demand = {1.0, 0.2, 0.0};
  return p;
}

std::vector<double> unit_gains(std::mt19937_64& rng, std::size_t K) {
  std::uniform_real_distribution<double> lg(-10.0, -6.0);
  std::vector<double> g(K);
  for (auto& v : g) v = std::pow(10.0, lg(rng));
  return g;
}

}  // namespace

TEST_CASE("choice_from_index accepts 1..3 only") {
  CHECK(choice_from_index(2) == OptimizerChoice::beamforming);
  CHECK_THROWS_AS(choice_from_index(0), std::invalid_argument);
  CHECK_THROWS_AS(choice_from_index(4), std::invalid_argument);
}

TEST_CASE("deferrable targets are the request clipped to available content") {
  const auto p = deferrable_problem(1);
  const std::vector<double> rho{0.5, 0.5, 0.5};
  const auto c = p.content(rho);
  CHECK(c[0] == doctest::Approx(1.0));
  CHECK(c[1] == doctest::Approx(0.1));
  CHECK(c[2] == doctest::Approx(2.0));
  const auto t = p.targets(rho);
  CHECK(t[0] == doctest::Approx(0.4));
  CHECK(t[1] == doctest::Approx(0.1));
  CHECK(t[2] == doctest::Approx(0.8));
  auto q = p;
  q.active[2] = false;
  CHECK_FALSE(q.schedule(rho)[2]);
  q.sem_backlog.pop_back();
  CHECK_THROWS_AS(q.content(rho), std::invalid_argument);
}

TEST_CASE("evaluate scores what the refreshed powers deliver") {
  const auto p = realtime_problem(3);
  auto a = OptimizedAction::initial(3, 16, 0.6);
  a.order = heuristic_order_by_gain(channel::equivalent_gains(p.channels, a.phases));
  const auto ev = evaluate(p, a);
  double cap = 0.0, raw = 0.0;
  for (std::size_t k = 0; k < 3; ++k) {
    CHECK(ev.delivered[k] <= ev.capacities[k] + 1e-12);
    cap += ev.capacities[k];
    raw += ev.delivered[k] / a.rho[k];
  }
  REQUIRE(ev.energy > 0.0);
  CHECK(ev.eta == doctest::Approx(cap / ev.energy));
  CHECK(ev.eta_hat == doctest::Approx(raw / ev.energy));
  if (ev.feasible)
    for (std::size_t k = 0; k < 3; ++k) CHECK(ev.capacities[k] == doctest::Approx(0.6));
}

TEST_CASE("nothing scheduled costs nothing") {
  auto p = realtime_problem(4);
  p.active.assign(3, false);
  const auto ev = evaluate(p, OptimizedAction::initial(3, 16, 1.0));
  CHECK(ev.energy == 0.0);
  CHECK(ev.eta_hat == 0.0);
  CHECK(ev.feasible);
}

TEST_CASE("better ranks feasibility first") {
  Evaluation a, b;
  a.feasible = true;
  a.eta = 1.0;
  b.feasible = false;
  b.eta = 5.0;
  CHECK(better(a, b));
  CHECK_FALSE(better(b, a));
  b.feasible = true;
  CHECK(better(b, a));
  a.eta_hat = 3.0;
  b.eta_hat = 2.0;
  CHECK(better(a, b, true));
}

TEST_CASE("brute-force order beats every permutation") {
  std::mt19937_64 rng(4);
  noma::RadioParams radio;
  for (int trial = 0; trial < 50; ++trial) {
    auto p = realtime_problem(static_cast<std::uint64_t>(trial), 4, 4, 0.3 + 0.01 * trial);
    const auto gains = unit_gains(rng, 4);
    const std::vector<double> rho(4, 1.0);
    const auto best = best_order_bruteforce(p, gains, rho);
    std::vector<std::size_t> seq{0, 1, 2, 3};
    do {
      const auto pc = noma::min_power_for_targets(gains, noma::DecodingOrder::from_sequence(seq),
                                                  p.targets(rho), p.schedule(rho), radio);
      if (best.feasible && pc.feasible) CHECK(best.sum_power <= pc.total_power() * (1 + 1e-12));
      if (!best.feasible) CHECK_FALSE(pc.feasible);
    } while (std::next_permutation(seq.begin(), seq.end()));
  }
}

TEST_CASE("brute-force order small cases") {
  auto p1 = realtime_problem(1, 1);
  const std::vector<double> g1{1e-8};
  CHECK(best_order_bruteforce(p1, g1, std::vector<double>{1.0}).order == noma::DecodingOrder::identity(1));
  auto p2 = realtime_problem(1, 2);
  const std::vector<double> g2{1e-8, 1e-7};
  const auto o = best_order_bruteforce(p2, g2, std::vector<double>{0.5, 0.5}).order;
  CHECK(o.sequence() == std::vector<std::size_t>{1, 0});
}

TEST_CASE("heuristic order") {
  const std::vector<double> g{4.0, 1.0, 9.0};
  CHECK(heuristic_order_by_gain(g).sequence() == std::vector<std::size_t>{2, 0, 1});
  std::mt19937_64 rng(6);
  for (int i = 0; i < 100; ++i) {
    auto gains = unit_gains(rng, 5);
    auto scaled = gains;
    for (auto& v : scaled) v *= 37.5;
    CHECK(heuristic_order_by_gain(gains) == heuristic_order_by_gain(scaled));
  }
}

TEST_CASE("gain order is power-optimal for equal targets") {
  std::mt19937_64 rng(7);
  int compared = 0, equal = 0;
  for (int trial = 0; compared < 1000 && trial < 5000; ++trial) {
    auto p = realtime_problem(1, 3, 4, 0.5);
    const auto gains = unit_gains(rng, 3);
    const std::vector<double> rho(3, 1.0);
    const auto best = best_order_bruteforce(p, gains, rho);
    if (!best.feasible) continue;
    ++compared;
    const auto pc = noma::min_power_for_targets(gains, heuristic_order_by_gain(gains), p.targets(rho),
                                                p.schedule(rho), p.params.radio);
    equal += pc.feasible && std::fabs(pc.total_power() - best.sum_power) <= 1e-9 * best.sum_power;
  }
  CHECK(compared == 1000);
  CHECK(equal == compared);
}

TEST_CASE("linearised binary penalty majorises pi - pi^2") {
  for (int i = 0; i <= 100; ++i)
    for (int j = 0; j <= 100; ++j) {
      const double pi = i / 100.0, pi0 = j / 100.0;
      REQUIRE(linearized_binary_penalty(pi, pi0) >= pi - pi * pi - 1e-15);
    }
  CHECK(linearized_binary_penalty(0.3, 0.3) == doctest::Approx(0.3 - 0.09));
}

TEST_CASE("order relaxation: penalty shrinks across stages and rounds to the optimum") {
  std::mt19937_64 rng(9);
  noma::RadioParams radio;
  int feasible = 0, match = 0;
  for (int trial = 0; feasible < 200 && trial < 2000; ++trial) {
    auto p = realtime_problem(1, 3, 4, 0.5);
    const auto gains = unit_gains(rng, 3);
    const std::vector<double> rho(3, 1.0);
    const auto best = best_order_bruteforce(p, gains, rho);
    if (!best.feasible) continue;
    ++feasible;
    const std::vector<double> powers(3, 1.0);
    const auto r = penalized_order_relaxation(gains, powers, {true, true, true});
    for (std::size_t s = 1; s < r.penalty_trace.size(); ++s)
      CHECK(r.penalty_trace[s] <= r.penalty_trace[s - 1] + 1e-12);
    const auto pc = noma::min_power_for_targets(gains, r.order, p.targets(rho), p.schedule(rho), radio);
    match += pc.feasible && std::fabs(pc.total_power() - best.sum_power) <= 1e-9 * best.sum_power;
  }
  CHECK(feasible == 200);
  CHECK(match >= 160);
}

TEST_CASE("order relaxation falls back without signal") {
  const std::vector<double> g{1.0, 2.0}, p{0.0, 0.0};
  const auto r = penalized_order_relaxation(g, p, {true, true});
  CHECK(r.fell_back);
  CHECK(r.order.sequence() == std::vector<std::size_t>{1, 0});
  RelaxationOptions short_run;
  short_run.steps = 1;
  short_run.zeta_schedule = {1.0};
  const std::vector<double> q{1.0, 1.0};
  CHECK(penalized_order_relaxation(g, q, {true, true}, short_run).fell_back);
  CHECK_THROWS_AS(penalized_order_relaxation(g, std::vector<double>{1.0}, {true, true}), std::invalid_argument);
}

TEST_CASE("coordinate ascent reaches the co-phasing optimum for one SU") {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const auto p = realtime_problem(seed, 1, 32);
    const auto res = phases_coordinate_ascent(
        p.channels, channel::PhaseVector::constant(32, 0.0), 4,
        [](std::span<const double> g) { return g[0]; });
    const double best = std::sqrt(channel::equivalent_gains(p.channels, channel::aligned_phases(p.channels, 0))[0]);
    const double got = std::sqrt(channel::equivalent_gains(p.channels, res.phases)[0]);
    CHECK(got >= 0.999 * best);
  }
}

TEST_CASE("coordinate ascent never decreases its objective") {
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    const auto p = realtime_problem(seed, 3, 8, 0.4);
    auto a = OptimizedAction::initial(3, 8, 1.0);
    const auto gains = channel::equivalent_gains(p.channels, a.phases);
    a.order = heuristic_order_by_gain(gains);
    const auto pc = noma::min_power_for_targets(gains, a.order, p.targets(a.rho), p.schedule(a.rho),
                                                p.params.radio);
    const auto res = phases_coordinate_ascent(p, a, pc.profile.power, 2);
    for (std::size_t i = 1; i < res.trace.size(); ++i) REQUIRE(res.trace[i] >= res.trace[i - 1]);
    CHECK(res.trace.size() == 1 + 2 * 8);
  }
}

TEST_CASE("transmit-power objective equals minus the refreshed power") {
  const auto p = realtime_problem(5, 3, 8, 0.3);
  auto a = OptimizedAction::initial(3, 8, 1.0);
  const auto gains = channel::equivalent_gains(p.channels, a.phases);
  a.order = heuristic_order_by_gain(gains);
  const auto obj = transmit_power_objective(p, a.order, a.rho);
  const auto ev = evaluate(p, a);
  if (ev.feasible) CHECK(-obj(gains) == doctest::Approx(ev.power.total_power()).epsilon(1e-9));
}

TEST_CASE("jtac retains its best iterate and stops") {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const auto p = realtime_problem(seed, 3, 16);
    const auto res = jtac_alternating(p, 1e-3, 10);
    REQUIRE(res.eta_trace.size() == res.iterations + 1);
    for (std::size_t i = 1; i < res.eta_trace.size(); ++i)
      CHECK(res.eta_trace[i] >= res.eta_trace[i - 1]);
    CHECK(res.evaluation.eta == doctest::Approx(res.eta_trace.back()));
    CHECK(res.iterations <= 10);
  }
}

TEST_CASE("jtac with quantised phases keeps phases on the grid") {
  const auto p = realtime_problem(2, 3, 8);
  JtacOptions o;
  o.quantize_bits = 2;
  const auto res = jtac_alternating(p, 1e-3, 5, o);
  for (std::size_t l = 0; l < 8; ++l) {
    const double idx = res.action.phases[l] / (kTwoPi / 4);
    CHECK(std::fabs(idx - std::round(idx)) < 1e-9);
  }
}

TEST_CASE("dispatch touches only its own variables") {
  const auto p = deferrable_problem(8, 3, 8);
  auto cur = OptimizedAction::initial(3, 8, 0.6);
  cur.order = noma::DecodingOrder::from_sequence({2, 1, 0});
  cur.phases = channel::PhaseVector::constant(8, 1.0);

  const auto m1 = dispatch(OptimizerChoice::extraction, p, cur);
  CHECK(m1.action.order == cur.order);
  CHECK(m1.action.phases == cur.phases);
  CHECK(m1.action.rho[0] == doctest::Approx(0.4));
  CHECK(m1.action.rho[1] == 1.0);
  CHECK(m1.action.rho[2] == 0.6);  // nothing extracted: depth carried

  const auto m2 = dispatch(OptimizerChoice::beamforming, p, cur);
  CHECK(m2.action.order == cur.order);
  CHECK(m2.action.rho == cur.rho);

  const auto m3 = dispatch(OptimizerChoice::decoding, p, cur);
  CHECK(m3.action.phases == cur.phases);
  CHECK(m3.action.rho == cur.rho);
}

TEST_CASE("lightweight beamforming aligns to the largest semantic backlog") {
  const auto p = deferrable_problem(8, 3, 8);
  const auto cur = OptimizedAction::initial(3, 8, 0.6);
  const auto m2 = dispatch(OptimizerChoice::beamforming, p, cur, Profile::lightweight);
  CHECK(m2.alignment_target == 2);
  CHECK(m2.action.phases == channel::aligned_phases(p.channels, 2));
}

TEST_CASE("lightweight decoding is much faster than brute force at K=6") {
  std::mt19937_64 rng(1);
  auto p = realtime_problem(1, 6, 4, 0.2);
  const auto cur = OptimizedAction::initial(6, 4, 1.0);
  auto time = [&](Profile profile) {
    const auto t0 = std::chrono::steady_clock::now();
    for (int i = 0; i < 200; ++i) dispatch(OptimizerChoice::decoding, p, cur, profile);
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  };
  CHECK(time(Profile::lightweight) * 10.0 <= time(Profile::exact));
}

TEST_CASE("dispatch_all keeps the best point it visits") {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const auto p = deferrable_problem(seed, 3, 8);
    const auto cur = OptimizedAction::initial(3, 8, 0.6);
    const auto all = dispatch_all(p, cur);
    CHECK_FALSE(better(evaluate(p, cur), all.evaluation, true));
    CHECK_FALSE(better(dispatch(OptimizerChoice::extraction, p, cur).evaluation, all.evaluation, true));
    const auto re = evaluate(p, all.action);
    CHECK(re.eta_hat == doctest::Approx(all.evaluation.eta_hat));
  }
}
