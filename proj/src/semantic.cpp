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

#include "risnoma/semantic.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace risnoma::semantic {

void validate(const SemanticParams& p) {
  if (!(p.a > 0.0 && p.b > 0.0)) throw std::invalid_argument("semantic: a and b must be positive");
  if (!(p.alpha_e > 0.0 && p.alpha_r > 0.0))
    throw std::invalid_argument("semantic: depth exponents must be positive");
  if (!(p.rho_min > 0.0 && p.rho_min <= 1.0))
    throw std::invalid_argument("semantic: rho_min must lie in (0, 1]");
}

double semantic_energy(double capacity, double rho, const SemanticParams& p) {
  if (capacity < 0.0) throw std::domain_error("semantic_energy: negative capacity");
  if (rho < p.rho_min * (1.0 - 1e-12) || rho > 1.0 + 1e-12)
    throw std::domain_error("semantic_energy: extraction depth outside [rho_min, 1]");
  if (capacity == 0.0) return 0.0;
  const double extraction = p.a * capacity / std::pow(rho, p.alpha_e);
  const double recovery = p.b * capacity / std::pow(rho, p.alpha_r);
  return p.kappa * (p.f * p.f * extraction + p.g * p.g * recovery);
}

double total_energy(std::span<const double> capacities, std::span<const double> rhos,
                    const noma::TransmitProfile& profile, const SemanticParams& params,
                    double slot_duration) {
  if (capacities.size() != rhos.size() || capacities.size() != profile.power.size())
    throw std::invalid_argument("total_energy: dimension mismatch");
  double e = 0.0;
  for (std::size_t k = 0; k < capacities.size(); ++k)
    e += semantic_energy(capacities[k], rhos[k], params) + slot_duration * profile.power[k];
  return e;
}

double QueuePair::window_mean() const {
  if (window.empty()) return 0.0;
  return std::accumulate(window.begin(), window.end(), 0.0) / static_cast<double>(window.size());
}

namespace {

void push_window(QueuePair& q) {
  q.window.push_back(q.total());
  while (q.window.size() > q.window_length) q.window.pop_front();
}

}  // namespace

QueuePair step_realtime_queue(QueuePair q, double arrival, double capacity, double rho) {
  q.raw_backlog = std::max(q.raw_backlog + arrival - capacity / rho, 0.0);
  push_window(q);
  return q;
}

double effective_extraction(const QueuePair& q, double arrival, double extract_size) {
  return std::clamp(extract_size, 0.0, q.raw_backlog + arrival);
}

QueuePair step_deferrable_queues(QueuePair q, double arrival, double extract_size, double rho,
                                 double capacity) {
  if (extract_size < 0.0) throw std::domain_error("step_deferrable_queues: negative extraction");
  const double extracted = effective_extraction(q, arrival, extract_size);
  q.raw_backlog = std::max(q.raw_backlog + arrival - extracted, 0.0);
  q.sem_backlog = std::max(q.sem_backlog + rho * extracted - capacity, 0.0);
  push_window(q);
  return q;
}

double delay_window_penalty(const QueuePair& q, double b_max, double lambda, bool hinge) {
  const double excess = q.window_mean() - b_max;
  return lambda * (hinge ? std::max(excess, 0.0) : excess);
}

double closed_form_rho(double capacity, double arrival, double rho_min) {
  if (!(arrival > 0.0)) throw std::domain_error("closed_form_rho: arrival must be positive");
  return std::max(std::min(capacity / arrival, 1.0), rho_min);
}

}  // namespace risnoma::semantic
