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

#include <cmath>
#include <random>
#include <stdexcept>

#include "risnoma/noma.hpp"
#include "risnoma/semantic.hpp"

using namespace risnoma;
using namespace risnoma::semantic;

namespace {

QueuePair window_of(std::vector<double> totals) {
  QueuePair q;
  q.window.assign(totals.begin(), totals.end());
  q.window_length = totals.size();
  return q;
}

double grid_rho(double S, double ell, const SemanticParams& p, double step) {
  double best = p.rho_min, best_e = INFINITY;
  for (double rho = p.rho_min; rho <= 1.0 + 1e-12; rho += step) {
    if (rho * ell > S + 1e-12) continue;
    const double e = semantic_energy(S, std::min(rho, 1.0), p);
    if (e < best_e) {
      best_e = e;
      best = std::min(rho, 1.0);
    }
  }
  return best;
}

}  // namespace

TEST_CASE("semantic energy at full depth") {
  SemanticParams p;
  CHECK(semantic_energy(1.0, 1.0, p) == doctest::Approx(0.225));
  CHECK(semantic_energy(0.0, 0.5, p) == 0.0);
  CHECK(semantic_energy(2.0, 1.0, p) == doctest::Approx(0.45));
  CHECK_THROWS_AS(semantic_energy(1.0, 0.1, p), std::domain_error);
  CHECK_THROWS_AS(semantic_energy(1.0, 1.1, p), std::domain_error);
  CHECK_THROWS_AS(semantic_energy(-1.0, 0.5, p), std::domain_error);
}

TEST_CASE("semantic energy falls with depth, matching its analytic slope") {
  SemanticParams p;
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> us(0.1, 3.0), ur(0.25, 0.95);
  for (int i = 0; i < 10; ++i) {
    const double S = us(rng), rho = ur(rng), h = 1e-6;
    const double fd = (semantic_energy(S, rho + h, p) - semantic_energy(S, rho - h, p)) / (2 * h);
    const double analytic = -p.kappa * S *
                            (p.f * p.f * p.a * p.alpha_e / std::pow(rho, p.alpha_e + 1) +
                             p.g * p.g * p.b * p.alpha_r / std::pow(rho, p.alpha_r + 1));
    CHECK(fd < 0.0);
    CHECK(fd == doctest::Approx(analytic).epsilon(1e-4));
  }
}

TEST_CASE("deeper compression can cost more than the transmit power it saves") {
  SemanticParams p;
  noma::RadioParams radio;
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> lg(-10.0, -7.0), ud(0.2, 2.0);
  bool found = false;
  for (int i = 0; i < 2000 && !found; ++i) {
    const double g = std::pow(10.0, lg(rng)), D = ud(rng);
    auto energy = [&](double rho) {
      const std::vector<double> gains{g}, targets{rho * D};
      const auto pc = noma::min_power_for_targets(gains, noma::DecodingOrder::identity(1), targets,
                                                  {true}, radio);
      return pc.feasible ? semantic_energy(rho * D, rho, p) + radio.slot_duration * pc.total_power()
                         : INFINITY;
    };
    found = std::isfinite(energy(0.9)) && energy(0.5) > energy(0.9);
  }
  CHECK(found);
}

TEST_CASE("total energy adds transmit energy") {
  SemanticParams p;
  const std::vector<double> caps{1.0, 0.5}, rhos{1.0, 1.0};
  const auto prof = noma::TransmitProfile::all_active({2.0, 3.0});
  CHECK(total_energy(caps, rhos, prof, p, 1.0) == doctest::Approx(0.225 * 1.5 + 5.0));
  CHECK_THROWS_AS(total_energy(caps, std::vector<double>{1.0}, prof, p, 1.0), std::invalid_argument);
}

TEST_CASE("closed-form depth") {
  CHECK(closed_form_rho(1.0, 1.0, 0.2) == 1.0);
  CHECK(closed_form_rho(0.1, 1.0, 0.2) == 0.2);
  CHECK(closed_form_rho(0.5, 1.0, 0.2) == 0.5);
  CHECK(closed_form_rho(5.0, 1.0, 0.2) == 1.0);
  CHECK_THROWS_AS(closed_form_rho(1.0, 0.0, 0.2), std::domain_error);
}

TEST_CASE("closed-form depth agrees with a fine grid search") {
  SemanticParams p;
  std::mt19937_64 rng(12);
  std::uniform_real_distribution<double> us(0.01, 2.0), ul(0.1, 2.0);
  for (int i = 0; i < 100; ++i) {
    const double S = us(rng), ell = ul(rng);
    const double step = 1e-4;
    CHECK(std::fabs(closed_form_rho(S, ell, p.rho_min) - grid_rho(S, ell, p, step)) <= step + 1e-12);
  }
}

TEST_CASE("window penalty") {
  const double b = 3.0, lam = 0.1;
  CHECK(delay_window_penalty(window_of({1.0, 2.0, 3.0}), b, lam) == 0.0);
  CHECK(delay_window_penalty(window_of({4.0, 4.0, 4.0}), b, lam) == doctest::Approx(lam));
  CHECK(delay_window_penalty(window_of({0.0, 3.0 * b, 0.0}), b, lam) == 0.0);
  CHECK(delay_window_penalty(window_of({1.0, 1.0}), b, lam, false) == doctest::Approx(-0.2));
  CHECK(window_of({}).window_mean() == 0.0);
}

TEST_CASE("window keeps the most recent totals") {
  QueuePair q;
  q.window_length = 3;
  for (int t = 0; t < 5; ++t) q = step_deferrable_queues(q, 1.0, 0.0, 1.0, 0.0);
  REQUIRE(q.window.size() == 3);
  CHECK(q.window.back() == doctest::Approx(5.0));
  CHECK(q.window.front() == doctest::Approx(3.0));
  CHECK(q.window_mean() == doctest::Approx(4.0));
}

TEST_CASE("deferrable queues move data between buffers") {
  QueuePair q;
  q.raw_backlog = 2.0;
  q.sem_backlog = 1.0;
  const auto n = step_deferrable_queues(q, 1.0, 2.5, 0.4, 0.6);
  CHECK(n.raw_backlog == doctest::Approx(0.5));
  CHECK(n.sem_backlog == doctest::Approx(1.0 + 0.4 * 2.5 - 0.6));
  CHECK(effective_extraction(q, 1.0, 10.0) == 3.0);
  CHECK(effective_extraction(q, 1.0, -1.0) == 0.0);
  CHECK_THROWS_AS(step_deferrable_queues(q, 1.0, -0.1, 0.5, 0.0), std::domain_error);
}

TEST_CASE("real-time queue drains capacity / rho raw bits") {
  QueuePair q;
  q.raw_backlog = 1.0;
  const auto n = step_realtime_queue(q, 0.5, 0.3, 0.5);
  CHECK(n.raw_backlog == doctest::Approx(0.9));
  CHECK(step_realtime_queue(q, 0.0, 5.0, 0.5).raw_backlog == 0.0);
}

TEST_CASE("queues never go negative under random actions") {
  std::mt19937_64 rng(99);
  std::uniform_real_distribution<double> u(0.0, 3.0), r(0.2, 1.0);
  QueuePair a, b;
  for (int t = 0; t < 100000; ++t) {
    a = step_deferrable_queues(a, u(rng), u(rng), r(rng), u(rng));
    b = step_realtime_queue(b, u(rng), u(rng), r(rng));
    REQUIRE(a.raw_backlog >= 0.0);
    REQUIRE(a.sem_backlog >= 0.0);
    REQUIRE(b.raw_backlog >= 0.0);
  }
}

TEST_CASE("parameter validation") {
  SemanticParams p;
  CHECK_NOTHROW(validate(p));
  p.rho_min = 0.0;
  CHECK_THROWS_AS(validate(p), std::invalid_argument);
  p = {};
  p.alpha_e = 0.0;
  CHECK_THROWS_AS(validate(p), std::invalid_argument);
}
