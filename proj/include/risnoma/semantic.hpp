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
#include <deque>
#include <span>
#include <vector>

#include "risnoma/noma.hpp"

namespace risnoma::semantic {

/// Extraction/recovery cost model. Loads are `a * S / rho^alpha_e` cycles at
/// the SU and `b * S / rho^alpha_r` cycles at the AP, with S in the same data
/// unit the caller uses for capacities.
struct SemanticParams {
  double a = 100.0;
  double b = 200.0;
  double alpha_e = 4.0;
  double alpha_r = 2.0;
  double f = 5e8;       // SU cycles/s
  double g = 1e9;       // AP cycles/s
  double kappa = 1e-21;
  double rho_min = 0.2;
};

void validate(const SemanticParams& params);

/// kappa * (f^2 W_e + g^2 W_r). Throws std::domain_error for rho outside
/// [rho_min, 1] or negative capacity.
double semantic_energy(double capacity, double rho, const SemanticParams& params);

/// Semantic energy plus tau * p_k summed over SUs.
double total_energy(std::span<const double> capacities, std::span<const double> rhos,
                    const noma::TransmitProfile& profile, const SemanticParams& params,
                    double slot_duration);

/// Raw and semantic backlogs of one SU plus the recent history of their sum.
struct QueuePair {
  double raw_backlog = 0.0;
  double sem_backlog = 0.0;
  std::deque<double> window;
  std::size_t window_length = 20;

  double total() const { return raw_backlog + sem_backlog; }
  double window_mean() const;
};

/// Single raw buffer: raw <- max(raw + arrival - capacity / rho, 0).
QueuePair step_realtime_queue(QueuePair q, double arrival, double capacity, double rho);

/// Separate buffers. Extraction is clamped to the raw data actually present.
QueuePair step_deferrable_queues(QueuePair q, double arrival, double extract_size, double rho,
                                 double capacity);

/// Raw bits an extraction request can actually consume this slot.
double effective_extraction(const QueuePair& q, double arrival, double extract_size);

/// lambda * max(mean(window) - b_max, 0). With `hinge == false` the raw
/// difference is returned instead, so an under-filled window earns a bonus.
double delay_window_penalty(const QueuePair& q, double b_max, double lambda, bool hinge = true);

/// max(min(capacity / arrival, 1), rho_min).
double closed_form_rho(double capacity, double arrival, double rho_min);

}  // namespace risnoma::semantic
