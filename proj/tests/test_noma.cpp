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
#include <numeric>
#include <random>
#include <stdexcept>

#include "risnoma/noma.hpp"

using namespace risnoma::noma;

namespace {

struct Instance {
  std::vector<double> gains;
  std::vector<double> power;
};

Instance random_instance(std::mt19937_64& rng, std::size_t K) {
  std::uniform_real_distribution<double> lg(-12.0, -7.0), lp(-3.0, 1.0);
  Instance in;
  for (std::size_t k = 0; k < K; ++k) {
    in.gains.push_back(std::pow(10.0, lg(rng)));
    in.power.push_back(std::pow(10.0, lp(rng)));
  }
  return in;
}

}  // namespace

TEST_CASE("DecodingOrder basics") {
  const auto o = DecodingOrder::from_sequence({2, 0, 1});
  CHECK(o.rank(2) == 0);
  CHECK(o.rank(0) == 1);
  CHECK(o.pi(2, 0) == 1);
  CHECK(o.pi(0, 2) == 0);
  CHECK(o.pi(1, 1) == 0);
  const auto m = o.precedence_matrix();
  for (std::size_t a = 0; a < 3; ++a)
    for (std::size_t b = 0; b < 3; ++b)
      if (a != b) CHECK(m[a][b] + m[b][a] == 1);
  CHECK_THROWS_AS(DecodingOrder::from_sequence({0, 0, 1}), std::invalid_argument);
  CHECK_THROWS_AS(DecodingOrder::from_sequence({0, 3, 1}), std::invalid_argument);
  CHECK(DecodingOrder::identity(4).sequence() == std::vector<std::size_t>{0, 1, 2, 3});
}

TEST_CASE("order_from_priorities breaks ties by index") {
  const std::vector<double> pr{0.5, 0.1, 0.5, -1.0};
  CHECK(order_from_priorities(pr).sequence() == std::vector<std::size_t>{3, 1, 0, 2});
}

TEST_CASE("per-SU capacities telescope to the sum capacity under every order") {
  std::mt19937_64 rng(17);
  RadioParams radio;
  for (int trial = 0; trial < 300; ++trial) {
    const std::size_t K = 2 + trial % 4;
    const auto in = random_instance(rng, K);
    const auto profile = TransmitProfile::all_active(in.power);
    const double total = sum_capacity(in.gains, profile, radio);
    std::vector<std::size_t> seq(K);
    std::iota(seq.begin(), seq.end(), 0);
    do {
      const auto caps = su_capacities(in.gains, profile, DecodingOrder::from_sequence(seq), radio);
      const double s = std::accumulate(caps.begin(), caps.end(), 0.0);
      REQUIRE(std::fabs(s - total) <= 1e-9 * total);
    } while (std::next_permutation(seq.begin(), seq.end()));
  }
}

TEST_CASE("unscheduled SUs carry nothing and interfere with nobody") {
  const std::vector<double> g{1e-9, 2e-9, 5e-10};
  TransmitProfile p = TransmitProfile::all_active({1.0, 1.0, 1.0});
  p.schedule[1] = false;
  RadioParams radio;
  const auto order = DecodingOrder::identity(3);
  CHECK(su_capacity(g, p, order, radio, 1) == 0.0);
  TransmitProfile two = TransmitProfile::all_active({1.0, 0.0, 1.0});
  CHECK(su_capacity(g, p, order, radio, 0) == doctest::Approx(su_capacity(g, two, order, radio, 0)));
  CHECK(sum_capacity(g, p, radio) == doctest::Approx(sum_capacity(g, two, radio)));
}

TEST_CASE("last-decoded SU sees only noise") {
  const std::vector<double> g{1e-9, 4e-9};
  RadioParams radio;
  const auto p = TransmitProfile::all_active({2.0, 3.0});
  const auto order = DecodingOrder::from_sequence({0, 1});
  const double expect = radio.slot_duration * radio.bandwidth *
                        std::log2(1.0 + g[1] * 3.0 / radio.noise_power);
  CHECK(su_capacity(g, p, order, radio, 1) == doctest::Approx(expect));
}

TEST_CASE("sinr_threshold inverts the capacity formula") {
  RadioParams radio;
  for (double bits : {0.1, 0.5, 1.0, 2.5}) {
    const double w = sinr_threshold(bits, radio);
    CHECK(radio.slot_duration * radio.bandwidth * std::log2(1.0 + w) == doctest::Approx(bits));
  }
}

TEST_CASE("min_power_for_targets meets every target exactly when feasible") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> lg(-9.0, -6.0), tg(0.0, 1.0);
  RadioParams radio;
  int checked = 0;
  for (int trial = 0; trial < 500; ++trial) {
    const std::size_t K = 2 + trial % 4;
    std::vector<double> gains(K), targets(K);
    for (std::size_t k = 0; k < K; ++k) {
      gains[k] = std::pow(10.0, lg(rng));
      targets[k] = tg(rng);
    }
    std::vector<std::size_t> seq(K);
    std::iota(seq.begin(), seq.end(), 0);
    std::shuffle(seq.begin(), seq.end(), rng);
    const auto order = DecodingOrder::from_sequence(seq);
    const auto pc = min_power_for_targets(gains, order, targets, std::vector<bool>(K, true), radio);
    if (!pc.feasible) continue;
    ++checked;
    const auto caps = su_capacities(gains, pc.profile, order, radio);
    for (std::size_t k = 0; k < K; ++k)
      CHECK(caps[k] == doctest::Approx(std::max(targets[k], radio.s_min)).epsilon(1e-9));
  }
  CHECK(checked > 100);
}

TEST_CASE("min_power_for_targets caps at p_max and reports the shortfall") {
  RadioParams radio;
  const std::vector<double> gains{1e-14, 1e-8};
  const std::vector<double> targets{2.0, 0.5};
  const auto pc = min_power_for_targets(gains, DecodingOrder::identity(2), targets, {true, true}, radio);
  CHECK_FALSE(pc.feasible);
  CHECK(pc.profile.power[0] == radio.p_max);
  CHECK(pc.violation == doctest::Approx(pc.required[0] - radio.p_max));
  CHECK(pc.profile.power[1] < radio.p_max);
  CHECK(pc.total_power() <= 2 * radio.p_max);
}

TEST_CASE("min_power_for_targets skips unscheduled SUs") {
  RadioParams radio;
  const std::vector<double> gains{1e-9, 1e-9};
  const auto pc = min_power_for_targets(gains, DecodingOrder::identity(2), std::vector<double>{1.0, 1.0},
                                        {false, true}, radio);
  CHECK(pc.profile.power[0] == 0.0);
  CHECK(pc.profile.power[1] == doctest::Approx(sinr_threshold(1.0, radio) * radio.noise_power / 1e-9));
}

TEST_CASE("input validation") {
  RadioParams radio;
  const auto p = TransmitProfile::all_active({1.0});
  CHECK_THROWS_AS(sum_capacity(std::vector<double>{1.0, 2.0}, p, radio), std::invalid_argument);
  CHECK_THROWS_AS(sum_capacity(std::vector<double>{1.0}, TransmitProfile::all_active({-1.0}), radio),
                  std::domain_error);
  RadioParams bad;
  bad.noise_power = 0.0;
  CHECK_THROWS_AS(sum_capacity(std::vector<double>{1.0}, p, bad), std::domain_error);
  CHECK_THROWS_AS(min_power_for_targets(std::vector<double>{1.0}, DecodingOrder::identity(1),
                                        std::vector<double>{-1.0}, {true}, radio),
                  std::domain_error);
}
