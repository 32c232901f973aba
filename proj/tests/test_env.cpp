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
#include <cmath>
#include <limits>
#include <random>
#include <sstream>
#include <stdexcept>

#include "risnoma/env.hpp"

using namespace risnoma;
using namespace risnoma::env;

namespace {

slotopt::OptimizedAction random_optimized(std::mt19937_64& rng, std::size_t K, std::size_t L) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<double> rho(K), ph(L);
  for (auto& r : rho) r = 0.2 + 0.8 * u(rng);
  for (auto& p : ph) p = kTwoPi * u(rng);
  std::vector<std::size_t> seq(K);
  for (std::size_t k = 0; k < K; ++k) seq[k] = k;
  std::shuffle(seq.begin(), seq.end(), rng);
  return {rho, noma::DecodingOrder::from_sequence(seq), channel::PhaseVector(ph)};
}

LearnedAction random_learned(std::mt19937_64& rng, std::size_t K, double hi) {
  std::uniform_real_distribution<double> u(-0.5 * hi, 1.5 * hi);
  auto a = LearnedAction::idle(K, 1 + static_cast<int>(rng() % 3));
  for (std::size_t k = 0; k < K; ++k) {
    a.extract[k] = u(rng);
    a.request[k] = u(rng);
    a.transmit[k] = rng() % 2;
  }
  return a;
}

}  // namespace

TEST_CASE("observation layout") {
  Environment env(default_config(3));
  const auto o = env.reset(1);
  CHECK(o.size() == 13);
  CHECK(env.observation_size() == 13);
  CHECK(o.back() == 0.0);
  for (std::size_t k = 3; k < 9; ++k) CHECK(o[k] == 0.0);
  Environment five(default_config(5));
  CHECK(five.reset(1).size() == 21);
}

TEST_CASE("same seed, same episode") {
  Environment a(default_config(3)), b(default_config(3));
  CHECK(a.reset(9) == b.reset(9));
  std::mt19937_64 r1(4), r2(4);
  for (int t = 0; t < 50; ++t) {
    const auto la = random_learned(r1, 3, 2.0);
    const auto oa = random_optimized(r1, 3, 70);
    const auto lb = random_learned(r2, 3, 2.0);
    const auto ob = random_optimized(r2, 3, 70);
    const auto sa = a.step(la, oa);
    const auto sb = b.step(lb, ob);
    REQUIRE(sa.reward == sb.reward);
    REQUIRE(sa.observation == sb.observation);
  }
  Environment c(default_config(3));
  CHECK(c.reset(10) != a.reset(9));
}

TEST_CASE("idle slot: reward is minus the penalty and queues grow by arrivals") {
  auto cfg = default_config(3);
  cfg.reward.window = 1;
  Environment env(cfg);
  env.reset(3);
  double total = 0.0;
  for (int t = 0; t < 10; ++t) {
    const auto arrivals = env.arrivals();
    const auto s = env.step(LearnedAction::idle(3), env.carried());
    for (std::size_t k = 0; k < 3; ++k) total += arrivals[k];
    CHECK(s.record.eta_hat == 0.0);
    CHECK(s.reward == doctest::Approx(-s.record.penalty));
    double raw = 0.0;
    for (double r : s.record.raw_backlog) raw += r;
    CHECK(raw == doctest::Approx(total));
  }
  CHECK(env.queues()[0].sem_backlog == 0.0);
}

TEST_CASE("zero arrivals leave nothing to send") {
  auto cfg = default_config(3);
  cfg.traffic.mean_arrival = 0.0;
  Environment env(cfg);
  env.reset(2);
  std::mt19937_64 rng(1);
  for (int t = 0; t < 100; ++t) {
    const auto s = env.step(random_learned(rng, 3, 2.0), random_optimized(rng, 3, 70));
    REQUIRE(s.record.eta_hat == 0.0);
    REQUIRE(s.record.energy == 0.0);
  }
}

TEST_CASE("extract-all, send-all reproduces the single-queue dynamics") {
  auto def = default_config(3);
  def.action_scale = 50.0;
  auto rt = def;
  rt.mode = slotopt::ExtractionMode::realtime;
  Environment d(def), r(rt);
  d.reset(6);
  r.reset(6);
  std::mt19937_64 rng(2);
  const std::vector<double> rho{0.5, 0.7, 0.9};
  for (int t = 0; t < 200; ++t) {
    auto opt = random_optimized(rng, 3, 70);
    opt.rho = rho;
    auto la = LearnedAction::idle(3);
    for (std::size_t k = 0; k < 3; ++k) {
      la.extract[k] = d.queues()[k].raw_backlog + d.arrivals()[k];
      la.request[k] = def.action_max();
      la.transmit[k] = true;
    }
    const auto sd = d.step(la, opt);
    const auto sr = r.step(la, opt);
    REQUIRE(sd.record.eta_hat == doctest::Approx(sr.record.eta_hat).epsilon(1e-9));
    for (std::size_t k = 0; k < 3; ++k) {
      CHECK(d.queues()[k].raw_backlog == doctest::Approx(0.0));
      CHECK(d.queues()[k].sem_backlog / rho[k] == doctest::Approx(r.queues()[k].raw_backlog).epsilon(1e-9));
    }
  }
}

TEST_CASE("random actions never drive a queue negative") {
  Environment env(default_config(3));
  env.reset(8);
  std::mt19937_64 rng(8);
  for (int t = 0; t < 20000; ++t) {
    const auto s = env.step(random_learned(rng, 3, 2.0), random_optimized(rng, 3, 70));
    for (std::size_t k = 0; k < 3; ++k) {
      REQUIRE(s.record.raw_backlog[k] >= 0.0);
      REQUIRE(s.record.sem_backlog[k] >= 0.0);
    }
    REQUIRE(std::isfinite(s.reward));
  }
}

TEST_CASE("sanitize clips into the action box") {
  Environment env(default_config(2));
  auto a = LearnedAction::idle(2, 7);
  a.extract = {-1.0, std::numeric_limits<double>::quiet_NaN()};
  a.request = {100.0, 0.5};
  const auto s = env.sanitize(a);
  CHECK(s.extract == std::vector<double>{0.0, 0.0});
  CHECK(s.request == std::vector<double>{2.0, 0.5});
  CHECK(s.mode == 3);
  CHECK_THROWS_AS(env.sanitize(LearnedAction::idle(3)), std::invalid_argument);
}

TEST_CASE("episode boundary") {
  auto cfg = default_config(2);
  cfg.episode_length = 5;
  Environment env(cfg);
  env.reset(1);
  for (int t = 1; t <= 10; ++t) {
    const auto s = env.step(LearnedAction::idle(2), env.carried());
    CHECK(s.done == (t % 5 == 0));
  }
}

TEST_CASE("wrong optimized dimensions are rejected") {
  Environment env(default_config(3));
  auto a = slotopt::OptimizedAction::initial(3, 10, 1.0);
  CHECK_THROWS_AS(env.step(LearnedAction::idle(3), a), std::invalid_argument);
}

TEST_CASE("invalid configurations are rejected") {
  auto cfg = default_config(3);
  cfg.reward.window = 0;
  CHECK_THROWS_AS(Environment{cfg}, std::invalid_argument);
  cfg = default_config(3);
  cfg.traffic.mean_arrival = -1.0;
  CHECK_THROWS_AS(Environment{cfg}, std::invalid_argument);
  cfg = default_config(3);
  cfg.action_scale = 0.0;
  CHECK_THROWS_AS(Environment{cfg}, std::invalid_argument);
}

TEST_CASE("run_policy closes the loop and writes a trace") {
  Environment env(default_config(3));
  const auto trace = run_policy(env, [](const Observation& o) {
    auto a = LearnedAction::idle(3, 3);
    for (std::size_t k = 0; k < 3; ++k) {
      a.extract[k] = 2.0;
      a.request[k] = 2.0;
      a.transmit[k] = true;
    }
    (void)o;
    return a;
  }, 50, 4);
  REQUIRE(trace.size() == 50);
  for (const auto& r : trace.records) CHECK(r.decision_seconds >= r.optimizer_seconds);
  std::ostringstream csv;
  trace.write_csv(csv);
  const auto text = csv.str();
  CHECK(text.rfind("slot,mode,reward,eta_hat", 0) == 0);
  CHECK(std::count(text.begin(), text.end(), '\n') == 51);
  Environment again(default_config(3));
  const auto t2 = run_policy(again, [](const Observation&) { return LearnedAction::idle(3, 1); }, 10, 4);
  CHECK(t2.mean_eta_hat() == 0.0);
}
