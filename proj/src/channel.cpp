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

#include "risnoma/channel.hpp"

#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>
#include <string>

namespace risnoma {

double dbm_to_watts(double dbm) { return std::pow(10.0, (dbm - 30.0) / 10.0); }

double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }

double wrap_phase(double phase) {
  double w = std::fmod(phase, kTwoPi);
  if (w < 0.0) w += kTwoPi;
  if (w >= kTwoPi) w = 0.0;
  return w;
}

namespace channel {

double distance(Point a, Point b) { return std::hypot(a.x - b.x, a.y - b.y); }

std::vector<Point> scatter_sus(std::size_t count, Point center, double radius,
                               std::uint64_t seed) {
  if (!(radius >= 0.0)) throw std::invalid_argument("scatter_sus: radius must be non-negative");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<Point> out;
  out.reserve(count);
  for (std::size_t k = 0; k < count; ++k) {
    const double r = radius * std::sqrt(unit(rng));
    const double a = kTwoPi * unit(rng);
    out.push_back({center.x + r * std::cos(a), center.y + r * std::sin(a)});
  }
  return out;
}

PhaseVector::PhaseVector(std::vector<double> phases) : phases_(std::move(phases)) {
  for (auto& p : phases_) p = wrap_phase(p);
}

PhaseVector PhaseVector::constant(std::size_t n, double phase) {
  return PhaseVector(std::vector<double>(n, phase));
}

std::vector<cplx> PhaseVector::lifted() const {
  std::vector<cplx> out(phases_.size());
  for (std::size_t l = 0; l < phases_.size(); ++l) out[l] = std::polar(1.0, phases_[l]);
  return out;
}

void validate(const Geometry& geometry) {
  if (geometry.sus.empty()) throw std::invalid_argument("geometry: at least one SU required");
  if (geometry.ris_elements == 0) throw std::invalid_argument("geometry: RIS needs at least one element");
  if (!(distance(geometry.ap, geometry.ris) > 0.0))
    throw std::invalid_argument("geometry: AP and RIS coincide");
  for (std::size_t k = 0; k < geometry.sus.size(); ++k) {
    if (!(distance(geometry.ap, geometry.sus[k]) > 0.0) ||
        !(distance(geometry.ris, geometry.sus[k]) > 0.0))
      throw std::invalid_argument("geometry: SU " + std::to_string(k) +
                                  " coincides with the AP or the RIS");
    for (std::size_t j = k + 1; j < geometry.sus.size(); ++j)
      if (!(distance(geometry.sus[k], geometry.sus[j]) > 0.0))
        throw std::invalid_argument("geometry: SUs " + std::to_string(k) + " and " +
                                    std::to_string(j) + " coincide");
  }
}

namespace {

double large_scale_amplitude(const FadingParams& f, double d, double exponent) {
  return std::sqrt(db_to_linear(f.pathloss_at_ref_db - 10.0 * exponent * std::log10(d)));
}

class RicianSampler {
 public:
  RicianSampler(double k_factor, double scatter_scale)
      : los_(std::isinf(k_factor) ? 1.0 : std::sqrt(k_factor / (k_factor + 1.0))),
        nlos_(std::isinf(k_factor) ? 0.0
                                   : scatter_scale * std::sqrt(1.0 / (k_factor + 1.0))) {
    if (k_factor < 0.0) throw std::invalid_argument("Rician factor must be non-negative");
  }

  cplx draw(double los_phase, std::mt19937_64& rng) {
    const cplx scatter(normal_(rng), normal_(rng));
    return los_ * std::polar(1.0, los_phase) + nlos_ * scatter;
  }

 private:
  double los_;
  double nlos_;
  std::normal_distribution<double> normal_{0.0, std::sqrt(0.5)};
};

Point element_position(const Geometry& g, const FadingParams& f, std::size_t l) {
  const double offset = (static_cast<double>(l) - 0.5 * static_cast<double>(g.ris_elements - 1)) *
                        0.5 * f.wavelength;
  return {g.ris.x, g.ris.y + offset};
}

}  // namespace

ChannelState sample_channels(const Geometry& geometry, const FadingParams& fading,
                             std::uint64_t rng_seed) {
  validate(geometry);
  const std::size_t K = geometry.num_sus();
  const std::size_t L = geometry.ris_elements;
  std::mt19937_64 rng(rng_seed);
  RicianSampler direct(fading.rician_k_direct, fading.scatter_scale);
  RicianSampler reflect(fading.rician_k_ris, fading.scatter_scale);
  const double wavenumber = kTwoPi / fading.wavelength;

  ChannelState s;
  s.h_direct.resize(K);
  s.h_ap_ris.resize(L);
  s.h_ris_su.assign(K, std::vector<cplx>(L));
  s.cascade.assign(K, std::vector<cplx>(L));

  const double amp_ap_ris =
      large_scale_amplitude(fading, distance(geometry.ap, geometry.ris), fading.exponent_ap_ris);
  for (std::size_t l = 0; l < L; ++l) {
    const double d = distance(geometry.ap, element_position(geometry, fading, l));
    s.h_ap_ris[l] = amp_ap_ris * reflect.draw(-wavenumber * d, rng);
  }
  for (std::size_t k = 0; k < K; ++k) {
    const Point su = geometry.sus[k];
    const double d_direct = distance(geometry.ap, su);
    s.h_direct[k] = large_scale_amplitude(fading, d_direct, fading.exponent_direct) *
                    direct.draw(-wavenumber * d_direct, rng);
    const double amp = large_scale_amplitude(fading, distance(geometry.ris, su),
                                             fading.exponent_ris_su);
    for (std::size_t l = 0; l < L; ++l) {
      const double d = distance(element_position(geometry, fading, l), su);
      s.h_ris_su[k][l] = amp * reflect.draw(-wavenumber * d, rng);
      s.cascade[k][l] = s.h_ap_ris[l] * s.h_ris_su[k][l];
    }
  }
  return s;
}

std::vector<cplx> compose_equivalent(const ChannelState& state, const PhaseVector& phases) {
  if (phases.size() != state.num_elements())
    throw std::invalid_argument("compose_equivalent: phase vector has " +
                                std::to_string(phases.size()) + " entries, RIS has " +
                                std::to_string(state.num_elements()));
  const auto theta = phases.lifted();
  std::vector<cplx> h(state.num_sus());
  for (std::size_t k = 0; k < h.size(); ++k) {
    cplx acc = state.h_direct[k];
    for (std::size_t l = 0; l < theta.size(); ++l) acc += state.cascade[k][l] * theta[l];
    h[k] = acc;
  }
  return h;
}

std::vector<double> equivalent_gains(const ChannelState& state, const PhaseVector& phases) {
  const auto h = compose_equivalent(state, phases);
  std::vector<double> g(h.size());
  for (std::size_t k = 0; k < h.size(); ++k) g[k] = std::norm(h[k]);
  return g;
}

PhaseVector aligned_phases(const ChannelState& state, std::size_t target_su) {
  if (target_su >= state.num_sus()) throw std::out_of_range("aligned_phases: SU index out of range");
  const auto& row = state.cascade[target_su];
  const cplx direct = state.h_direct[target_su];
  const double ref = direct == cplx{} ? 0.0 : std::arg(direct);
  std::vector<double> phases(row.size());
  for (std::size_t l = 0; l < row.size(); ++l)
    phases[l] = row[l] == cplx{} ? 0.0 : ref - std::arg(row[l]);
  return PhaseVector(std::move(phases));
}

PhaseVector quantize_phases(const PhaseVector& phases, unsigned bits) {
  if (bits == 0 || bits > 16) throw std::invalid_argument("quantize_phases: bits must be in [1, 16]");
  const double levels = static_cast<double>(1u << bits);
  const double step = kTwoPi / levels;
  std::vector<double> out(phases.size());
  for (std::size_t l = 0; l < phases.size(); ++l)
    out[l] = step * std::round(phases[l] / step);
  return PhaseVector(std::move(out));
}

}  // namespace channel
}  // namespace risnoma
