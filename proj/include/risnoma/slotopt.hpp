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
#include <functional>
#include <span>
#include <vector>

#include "risnoma/channel.hpp"
#include "risnoma/noma.hpp"
#include "risnoma/semantic.hpp"

namespace risnoma::slotopt {

enum class Profile { exact, lightweight };

/// Which control family a single dispatch re-optimises.
enum class OptimizerChoice : int { extraction = 1, beamforming = 2, decoding = 3 };

OptimizerChoice choice_from_index(int m);

enum class ExtractionMode { realtime, deferrable };

struct SystemParams {
  noma::RadioParams radio;
  semantic::SemanticParams semantic;
};

/// Everything a per-slot optimiser may look at.
///
/// Real-time: `raw_demand` is the raw data that must leave this slot (backlog
/// plus arrival); an SU carries rho * raw_demand.
/// Deferrable: `raw_demand` is the raw data extracted this slot, `sem_backlog`
/// the semantic data already buffered, `request` the transmit size Z.
struct SlotProblem {
  channel::ChannelState channels;
  SystemParams params;
  ExtractionMode mode = ExtractionMode::realtime;
  std::vector<bool> active;
  std::vector<double> raw_demand;
  std::vector<double> sem_backlog;
  std::vector<double> request;

  std::size_t num_sus() const { return channels.num_sus(); }
  /// Semantic data available for transmission under depths `rho`.
  std::vector<double> content(std::span<const double> rho) const;
  std::vector<double> targets(std::span<const double> rho) const;
  std::vector<bool> schedule(std::span<const double> rho) const;
};

/// The optimiser-owned part of a slot action.
struct OptimizedAction {
  std::vector<double> rho;
  noma::DecodingOrder order;
  channel::PhaseVector phases;

  static OptimizedAction initial(std::size_t num_sus, std::size_t num_elements, double rho);
};

struct Evaluation {
  noma::PowerControl power;
  std::vector<double> gains;
  std::vector<double> capacities;
  std::vector<double> delivered;
  double energy = 0.0;
  /// Semantic bits per joule.
  double eta = 0.0;
  /// Recovered raw bits per joule.
  double eta_hat = 0.0;
  bool feasible = true;
};

/// Refreshes powers by minimal power control and scores the result.
Evaluation evaluate(const SlotProblem& problem, const OptimizedAction& action);
Evaluation evaluate(const SlotProblem& problem, std::span<const double> gains,
                    const OptimizedAction& action);

/// Ranking used by every retention rule: feasible beats infeasible, then eta.
bool better(const Evaluation& a, const Evaluation& b, bool use_eta_hat = false);

// ---------------------------------------------------------------------------
// Decoding order

struct OrderSearch {
  noma::DecodingOrder order;
  bool feasible = true;
  double sum_power = 0.0;
  double violation = 0.0;
};

/// Enumerates every permutation of the scheduled SUs (at most 8) and keeps the
/// one with the smallest total power; infeasible orders rank after feasible
/// ones, by violation. Ties go to the lexicographically first permutation.
OrderSearch best_order_bruteforce(const SlotProblem& problem, std::span<const double> gains,
                                  std::span<const double> rho);

/// Descending |h_k|^2, ties by SU index.
noma::DecodingOrder heuristic_order_by_gain(std::span<const double> gains);

struct RelaxationOptions {
  std::vector<double> zeta_schedule{1.0, 10.0, 100.0, 1000.0};
  unsigned steps = 200;
  double tolerance = 1e-6;
};

struct RelaxationResult {
  noma::DecodingOrder order;
  /// Continuous precedence matrix after the last stage.
  std::vector<std::vector<double>> pi;
  /// epsilon_1 + epsilon_2 at the end of each zeta stage.
  std::vector<double> penalty_trace;
  bool converged = false;
  bool fell_back = false;
};

/// Penalised continuous relaxation of the precedence matrix, solved by
/// projected gradient ascent with the binary constraint linearised at the
/// previous iterate. `powers` are the transmit powers held fixed.
RelaxationResult penalized_order_relaxation(std::span<const double> gains,
                                            std::span<const double> powers,
                                            const std::vector<bool>& active,
                                            const RelaxationOptions& options = {});

/// pi + pi0^2 - 2 pi pi0: the tangent of pi - pi^2 at pi0.
inline double linearized_binary_penalty(double pi, double pi0) { return pi + pi0 * pi0 - 2.0 * pi * pi0; }

// ---------------------------------------------------------------------------
// Passive beamforming

/// Scalar objective over the equivalent channel gains |h_k|^2.
using GainObjective = std::function<double(std::span<const double> gains)>;

/// Sum over scheduled SUs of the SINR margin
/// |h_k|^2 p_k / omega_k - (interference_k + sigma^2), in units of sigma^2.
GainObjective slack_objective(const SlotProblem& problem, const noma::DecodingOrder& order,
                              std::span<const double> powers, std::span<const double> rho);

/// Negative total transmit power needed to meet the targets under `order`.
/// Received powers are fixed by targets and order, so only 1/|h_k|^2 moves.
GainObjective transmit_power_objective(const SlotProblem& problem,
                                       const noma::DecodingOrder& order,
                                       std::span<const double> rho);

struct PhaseSearch {
  channel::PhaseVector phases;
  /// Objective after every single-element update, starting with the initial value.
  std::vector<double> trace;
};

/// Cyclic per-element argmax over a uniform `levels` grid (the current phase
/// is always a candidate, so the objective never decreases).
PhaseSearch phases_coordinate_ascent(const channel::ChannelState& channels,
                                     const channel::PhaseVector& init, unsigned sweeps,
                                     const GainObjective& objective, unsigned levels = 256);

/// Slack-surrogate variant at the powers implied by `action`.
PhaseSearch phases_coordinate_ascent(const SlotProblem& problem, const OptimizedAction& action,
                                     std::span<const double> powers, unsigned sweeps);

// ---------------------------------------------------------------------------
// Alternating optimisation

struct JtacOptions {
  Profile profile = Profile::exact;
  bool optimize_phases = true;
  bool optimize_rho = true;
  bool optimize_order = true;
  /// 0 keeps continuous phases; otherwise phases are rounded to 2^bits levels.
  unsigned quantize_bits = 0;
  unsigned phase_sweeps = 3;
  unsigned rho_levels = 33;
};

struct JtacResult {
  OptimizedAction action;
  Evaluation evaluation;
  /// Retained (best-so-far) eta after each iteration; index 0 is the initial point.
  std::vector<double> eta_trace;
  std::size_t iterations = 0;
  bool converged = false;
};

/// Alternates order -> phases -> rho -> power on a real-time slot problem,
/// retaining the best iterate, until eta improves by at most `eps`.
JtacResult jtac_alternating(const SlotProblem& problem, double eps = 1e-3,
                            std::size_t max_iters = 10, const JtacOptions& options = {},
                            const OptimizedAction* init = nullptr);

// ---------------------------------------------------------------------------
// Online dispatch

struct DispatchResult {
  OptimizedAction action;
  Evaluation evaluation;
  std::size_t alignment_target = 0;
};

/// Re-optimises one control family and refreshes powers; the rest of
/// `current` is carried over unchanged.
DispatchResult dispatch(OptimizerChoice choice, const SlotProblem& problem,
                        const OptimizedAction& current, Profile profile = Profile::exact);

/// Runs every mode in turn for up to `rounds` rounds, keeping the best result.
DispatchResult dispatch_all(const SlotProblem& problem, const OptimizedAction& current,
                            Profile profile = Profile::exact, unsigned rounds = 3,
                            double eps = 1e-3);

}  // namespace risnoma::slotopt
