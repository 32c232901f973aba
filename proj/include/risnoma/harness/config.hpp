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

#include <cstdint>
#include <string>
#include <vector>

#include "risnoma/env.hpp"
#include "risnoma/ppo/ppo.hpp"
#include "risnoma/slotopt.hpp"

namespace risnoma::harness {

/// Flat experiment description. Everything else is derived from it.
struct ExperimentConfig {
  std::string scenario = "default";

  // geometry
  std::size_t num_sus = 3;
  std::size_t ris_elements = 70;
  double ris_x = 5.0;
  double ris_y = 0.0;
  double su_center_x = 7.0;
  double su_center_y = 3.0;
  double su_radius = 1.0;
  std::uint64_t layout_seed = 7;

  channel::FadingParams fading;

  // radio
  double noise_dbm = -90.0;
  double p_max_dbm = 40.0;
  double bandwidth_khz = 0.1;
  double slot_seconds = 1.0;
  double s_min = 0.1;

  semantic::SemanticParams semantic;
  env::TrafficParams traffic;
  env::RewardParams reward;
  slotopt::ExtractionMode mode = slotopt::ExtractionMode::deferrable;
  std::size_t episode_length = 200;
  double action_scale = 2.0;

  ppo::PpoConfig ppo;

  // run
  std::string scheme = "pdoo";
  slotopt::Profile profile = slotopt::Profile::exact;
  std::uint64_t seed = 42;
  std::size_t train_steps = 30000;
  std::size_t eval_episodes = 5;
  /// Sample from the learner during evaluation instead of taking its mean action.
  bool stochastic_eval = true;
  std::size_t seeds = 5;
  std::size_t jtac_iters = 10;
  double jtac_eps = 1e-3;

  env::EnvConfig env_config() const;
};

/// Sets one `section.key` entry from text. Throws std::invalid_argument for
/// unknown keys or unparsable values.
void set_value(ExperimentConfig& config, const std::string& key, const std::string& value);

/// Every key accepted by set_value.
std::vector<std::string> config_keys();

/// Reads an INI file (sections per module, `key = value` lines).
ExperimentConfig load_config(const std::string& path);
ExperimentConfig load_config(const std::string& path, ExperimentConfig base);

std::string to_string(slotopt::Profile profile);
slotopt::Profile parse_profile(const std::string& text);

}  // namespace risnoma::harness
