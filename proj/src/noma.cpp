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

#include "risnoma/noma.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace risnoma::noma {

DecodingOrder DecodingOrder::identity(std::size_t num_sus) {
  std::vector<std::size_t> seq(num_sus);
  std::iota(seq.begin(), seq.end(), 0);
  return from_sequence(std::move(seq));
}

DecodingOrder DecodingOrder::from_sequence(std::vector<std::size_t> sequence) {
  DecodingOrder o;
  o.rank_.assign(sequence.size(), sequence.size());
  for (std::size_t pos = 0; pos < sequence.size(); ++pos) {
    const std::size_t su = sequence[pos];
    if (su >= sequence.size() || o.rank_[su] != sequence.size())
      throw std::invalid_argument("DecodingOrder: sequence is not a permutation");
    o.rank_[su] = pos;
  }
  o.sequence_ = std::move(sequence);
  return o;
}

std::vector<std::vector<int>> DecodingOrder::precedence_matrix() const {
  const std::size_t K = size();
  std::vector<std::vector<int>> m(K, std::vector<int>(K, 0));
  for (std::size_t k = 0; k < K; ++k)
    for (std::size_t kp = 0; kp < K; ++kp) m[k][kp] = pi(k, kp);
  return m;
}

DecodingOrder order_from_priorities(std::span<const double> priorities) {
  std::vector<std::size_t> seq(priorities.size());
  std::iota(seq.begin(), seq.end(), 0);
  std::stable_sort(seq.begin(), seq.end(), [&](std::size_t a, std::size_t b) {
    return priorities[a] < priorities[b];
  });
  return DecodingOrder::from_sequence(std::move(seq));
}

TransmitProfile TransmitProfile::all_active(std::vector<double> power) {
  TransmitProfile p;
  p.schedule.assign(power.size(), true);
  p.power = std::move(power);
  return p;
}

namespace {

void check_inputs(std::span<const double> gains, const TransmitProfile& profile,
                  const RadioParams& radio) {
  if (gains.size() != profile.power.size() || profile.schedule.size() != profile.power.size())
    throw std::invalid_argument("noma: gains, powers and schedule must have equal length");
  if (!(radio.noise_power > 0.0)) throw std::domain_error("noma: noise power must be positive");
  for (double p : profile.power)
    if (p < 0.0) throw std::domain_error("noma: negative transmit power");
}

}  // namespace

double su_capacity(std::span<const double> gains, const TransmitProfile& profile,
                   const DecodingOrder& order, const RadioParams& radio, std::size_t su) {
  check_inputs(gains, profile, radio);
  if (!profile.schedule[su]) return 0.0;
  double interference = 0.0;
  for (std::size_t kp = 0; kp < gains.size(); ++kp)
    if (profile.schedule[kp] && order.pi(su, kp)) interference += gains[kp] * profile.power[kp];
  const double sinr = gains[su] * profile.power[su] / (interference + radio.noise_power);
  return radio.slot_duration * radio.bandwidth * std::log2(1.0 + sinr);
}

std::vector<double> su_capacities(std::span<const double> gains, const TransmitProfile& profile,
                                  const DecodingOrder& order, const RadioParams& radio) {
  std::vector<double> out(gains.size());
  for (std::size_t k = 0; k < gains.size(); ++k)
    out[k] = su_capacity(gains, profile, order, radio, k);
  return out;
}

double sum_capacity(std::span<const double> gains, const TransmitProfile& profile,
                    const RadioParams& radio) {
  check_inputs(gains, profile, radio);
  double received = 0.0;
  for (std::size_t k = 0; k < gains.size(); ++k)
    if (profile.schedule[k]) received += gains[k] * profile.power[k];
  return radio.slot_duration * radio.bandwidth * std::log2(1.0 + received / radio.noise_power);
}

double sinr_threshold(double bits, const RadioParams& radio) {
  return std::exp2(bits / (radio.slot_duration * radio.bandwidth)) - 1.0;
}

double PowerControl::total_power() const {
  return std::accumulate(profile.power.begin(), profile.power.end(), 0.0);
}

PowerControl min_power_for_targets(std::span<const double> gains, const DecodingOrder& order,
                                   std::span<const double> targets,
                                   const std::vector<bool>& schedule, const RadioParams& radio) {
  const std::size_t K = gains.size();
  if (targets.size() != K || schedule.size() != K || order.size() != K)
    throw std::invalid_argument("min_power_for_targets: dimension mismatch");
  if (!(radio.noise_power > 0.0)) throw std::domain_error("noma: noise power must be positive");

  PowerControl pc;
  pc.profile.power.assign(K, 0.0);
  pc.profile.schedule = schedule;
  pc.required.assign(K, 0.0);

  double later_received = 0.0;
  const auto& seq = order.sequence();
  for (auto it = seq.rbegin(); it != seq.rend(); ++it) {
    const std::size_t k = *it;
    if (!schedule[k]) continue;
    if (targets[k] < 0.0) throw std::domain_error("min_power_for_targets: negative target");
    const double omega = sinr_threshold(std::max(targets[k], radio.s_min), radio);
    const double needed_rx = omega * (later_received + radio.noise_power);
    const double need = gains[k] > 0.0 ? needed_rx / gains[k]
                                       : std::numeric_limits<double>::infinity();
    pc.required[k] = need;
    if (need > radio.p_max * (1.0 + 1e-12)) {
      pc.feasible = false;
      pc.violation += need - radio.p_max;
      pc.profile.power[k] = radio.p_max;
    } else {
      pc.profile.power[k] = std::min(need, radio.p_max);
    }
    later_received += gains[k] * pc.profile.power[k];
  }
  return pc;
}

}  // namespace risnoma::noma
