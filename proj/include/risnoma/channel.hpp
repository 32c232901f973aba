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

#include <complex>
#include <cstdint>
#include <span>
#include <vector>

namespace risnoma {

using cplx = std::complex<double>;

inline constexpr double kTwoPi = 6.283185307179586476925286766559;

double dbm_to_watts(double dbm);
double db_to_linear(double db);

/// Wraps an angle into [0, 2*pi).
double wrap_phase(double phase);

namespace channel {

struct Point {
  double x = 0.0;
  double y = 0.0;
};

double distance(Point a, Point b);

/// Planar deployment. The RIS is a uniform linear array along the y axis,
/// centred on `ris`, with half-wavelength element spacing.
struct Geometry {
  Point ap{0.0, 0.0};
  Point ris{5.0, 0.0};
  std::vector<Point> sus;
  std::size_t ris_elements = 70;

  std::size_t num_sus() const { return sus.size(); }
};

/// SU positions drawn uniformly in a disc of `radius` around `center`.
std::vector<Point> scatter_sus(std::size_t count, Point center, double radius,
                               std::uint64_t seed);

struct FadingParams {
  double pathloss_at_ref_db = -30.0;
  double exponent_direct = 3.5;
  double exponent_ap_ris = 2.0;
  double exponent_ris_su = 3.5;
  double rician_k_direct = 0.0;
  double rician_k_ris = 3.0;
  /// Multiplies the standard deviation of the scattered component. 1 keeps
  /// the small-scale gain at unit mean power.
  double scatter_scale = 1.0;
  double wavelength = 0.1;
};

struct ChannelState {
  std::vector<cplx> h_direct;                // per SU
  std::vector<cplx> h_ap_ris;                // per element
  std::vector<std::vector<cplx>> h_ris_su;   // [su][element]
  std::vector<std::vector<cplx>> cascade;    // [su][element]

  std::size_t num_sus() const { return h_direct.size(); }
  std::size_t num_elements() const { return h_ap_ris.size(); }
};

/// RIS reflection phases. Stored wrapped into [0, 2*pi).
class PhaseVector {
 public:
  PhaseVector() = default;
  explicit PhaseVector(std::vector<double> phases);
  static PhaseVector constant(std::size_t n, double phase);

  std::size_t size() const { return phases_.size(); }
  double operator[](std::size_t l) const { return phases_[l]; }
  void set(std::size_t l, double phase) { phases_[l] = wrap_phase(phase); }
  std::span<const double> values() const { return phases_; }
  std::vector<cplx> lifted() const;

  bool operator==(const PhaseVector&) const = default;

 private:
  std::vector<double> phases_;
};

void validate(const Geometry& geometry);

/// Draws one quasi-static realisation of every link. Throws
/// std::invalid_argument on a degenerate geometry.
ChannelState sample_channels(const Geometry& geometry, const FadingParams& fading,
                             std::uint64_t rng_seed);

/// h_k = sum_l cascade[k][l] e^{j phi_l} + h_direct[k] for every SU.
std::vector<cplx> compose_equivalent(const ChannelState& state, const PhaseVector& phases);

/// |h_k|^2 for every SU.
std::vector<double> equivalent_gains(const ChannelState& state, const PhaseVector& phases);

/// Co-phases every reflected path of `target_su` with its direct path.
PhaseVector aligned_phases(const ChannelState& state, std::size_t target_su);

/// Rounds every phase to the nearest of 2^bits uniform levels.
PhaseVector quantize_phases(const PhaseVector& phases, unsigned bits);

}  // namespace channel
}  // namespace risnoma
