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

#include <cstddef>
#include <span>
#include <vector>

namespace risnoma::noma {

/// Link-level constants shared by every SU.
///
/// Capacities are `slot_duration * bandwidth * log2(1 + SINR)`. With data in
/// Kbit and the bandwidth in kHz, capacities come out in Kbit per slot.
struct RadioParams {
  double noise_power = 1e-12;   // W (-90 dBm)
  double slot_duration = 1.0;   // s
  double bandwidth = 0.1;       // kHz
  double p_max = 10.0;          // W (40 dBm)
  double s_min = 0.1;           // Kbit
};

/// SIC decoding order. Lower rank is decoded earlier and therefore sees every
/// later-decoded SU as interference (pi_{k,k'} = 1).
class DecodingOrder {
 public:
  DecodingOrder() = default;
  static DecodingOrder identity(std::size_t num_sus);
  /// `sequence[0]` is decoded first.
  static DecodingOrder from_sequence(std::vector<std::size_t> sequence);

  std::size_t size() const { return sequence_.size(); }
  const std::vector<std::size_t>& sequence() const { return sequence_; }
  /// Position of `su` in the decoding sequence (its rank, 0-based).
  std::size_t rank(std::size_t su) const { return rank_[su]; }
  /// pi_{k,k'}: 1 iff `k` is decoded before `kp`.
  int pi(std::size_t k, std::size_t kp) const { return k != kp && rank_[k] < rank_[kp] ? 1 : 0; }
  std::vector<std::vector<int>> precedence_matrix() const;

  bool operator==(const DecodingOrder&) const = default;

 private:
  std::vector<std::size_t> sequence_;
  std::vector<std::size_t> rank_;
};

/// Builds the order implied by per-SU priorities (smaller decodes first).
/// Duplicate priorities are broken by SU index, lower index first.
DecodingOrder order_from_priorities(std::span<const double> priorities);

struct TransmitProfile {
  std::vector<double> power;     // W
  std::vector<bool> schedule;    // psi_k

  static TransmitProfile all_active(std::vector<double> power);
  std::size_t size() const { return power.size(); }
};

/// Per-SU capacity with scheduling flags. Unscheduled SUs get zero and cause
/// no interference. `gains` are |h_k|^2.
double su_capacity(std::span<const double> gains, const TransmitProfile& profile,
                   const DecodingOrder& order, const RadioParams& radio, std::size_t su);

std::vector<double> su_capacities(std::span<const double> gains, const TransmitProfile& profile,
                                  const DecodingOrder& order, const RadioParams& radio);

/// Closed-form sum capacity; independent of the decoding order.
double sum_capacity(std::span<const double> gains, const TransmitProfile& profile,
                    const RadioParams& radio);

/// SINR threshold needed to carry `bits` in one slot.
double sinr_threshold(double bits, const RadioParams& radio);

struct PowerControl {
  /// Best-effort powers, each capped at p_max.
  TransmitProfile profile;
  /// Power each SU would need given the (capped) powers of later SUs.
  std::vector<double> required;
  bool feasible = true;
  /// Sum of (required - p_max) over SUs that hit the cap.
  double violation = 0.0;

  double total_power() const;
};

/// Minimal powers meeting max(target_k, s_min) for every scheduled SU,
/// back-substituted from the last-decoded SU upward. SUs that would exceed
/// p_max are capped and reported through `feasible` / `violation`.
PowerControl min_power_for_targets(std::span<const double> gains, const DecodingOrder& order,
                                   std::span<const double> targets,
                                   const std::vector<bool>& schedule, const RadioParams& radio);

}  // namespace risnoma::noma
