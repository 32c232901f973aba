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

#include "risnoma/harness/config.hpp"

#include <functional>
#include <map>
#include <stdexcept>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

namespace risnoma::harness {

namespace {

double to_double(const std::string& key, const std::string& v) {
  std::size_t used = 0;
  double d = 0.0;
  try {
    d = std::stod(v, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != v.size()) throw std::invalid_argument("config: " + key + " expects a number, got '" + v + "'");
  return d;
}

std::uint64_t to_uint(const std::string& key, const std::string& v) {
  const double d = to_double(key, v);
  if (d < 0.0 || d != static_cast<double>(static_cast<std::uint64_t>(d)))
    throw std::invalid_argument("config: " + key + " expects a non-negative integer");
  return static_cast<std::uint64_t>(d);
}

bool to_bool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  throw std::invalid_argument("config: " + key + " expects true/false");
}

using Setter = std::function<void(ExperimentConfig&, const std::string& key, const std::string& value)>;

template <class T>
Setter real(T ExperimentConfig::*field) {
  return [field](ExperimentConfig& c, const std::string& k, const std::string& v) { c.*field = to_double(k, v); };
}

Setter real(std::function<double&(ExperimentConfig&)> ref) {
  return [ref](ExperimentConfig& c, const std::string& k, const std::string& v) { ref(c) = to_double(k, v); };
}

template <class T>
Setter count(std::function<T&(ExperimentConfig&)> ref) {
  return [ref](ExperimentConfig& c, const std::string& k, const std::string& v) {
    ref(c) = static_cast<T>(to_uint(k, v));
  };
}

const std::map<std::string, Setter>& setters() {
  static const std::map<std::string, Setter> table = [] {
    std::map<std::string, Setter> t;
    using C = ExperimentConfig;
    t["scenario.name"] = [](C& c, const std::string&, const std::string& v) { c.scenario = v; };

    t["geometry.num_sus"] = count<std::size_t>([](C& c) -> std::size_t& { return c.num_sus; });
    t["geometry.ris_elements"] = count<std::size_t>([](C& c) -> std::size_t& { return c.ris_elements; });
    t["geometry.ris_x"] = real(&C::ris_x);
    t["geometry.ris_y"] = real(&C::ris_y);
    t["geometry.su_center_x"] = real(&C::su_center_x);
    t["geometry.su_center_y"] = real(&C::su_center_y);
    t["geometry.su_radius"] = real(&C::su_radius);
    t["geometry.layout_seed"] = count<std::uint64_t>([](C& c) -> std::uint64_t& { return c.layout_seed; });

    t["fading.pathloss_db"] = real([](C& c) -> double& { return c.fading.pathloss_at_ref_db; });
    t["fading.exponent_direct"] = real([](C& c) -> double& { return c.fading.exponent_direct; });
    t["fading.exponent_ap_ris"] = real([](C& c) -> double& { return c.fading.exponent_ap_ris; });
    t["fading.exponent_ris_su"] = real([](C& c) -> double& { return c.fading.exponent_ris_su; });
    t["fading.rician_k_direct"] = real([](C& c) -> double& { return c.fading.rician_k_direct; });
    t["fading.rician_k_ris"] = real([](C& c) -> double& { return c.fading.rician_k_ris; });
    t["fading.scatter_scale"] = real([](C& c) -> double& { return c.fading.scatter_scale; });
    t["fading.wavelength"] = real([](C& c) -> double& { return c.fading.wavelength; });

    t["radio.noise_dbm"] = real(&C::noise_dbm);
    t["radio.p_max_dbm"] = real(&C::p_max_dbm);
    t["radio.bandwidth_khz"] = real(&C::bandwidth_khz);
    t["radio.slot_seconds"] = real(&C::slot_seconds);
    t["radio.s_min"] = real(&C::s_min);

    t["semantic.a"] = real([](C& c) -> double& { return c.semantic.a; });
    t["semantic.b"] = real([](C& c) -> double& { return c.semantic.b; });
    t["semantic.alpha_e"] = real([](C& c) -> double& { return c.semantic.alpha_e; });
    t["semantic.alpha_r"] = real([](C& c) -> double& { return c.semantic.alpha_r; });
    t["semantic.f"] = real([](C& c) -> double& { return c.semantic.f; });
    t["semantic.g"] = real([](C& c) -> double& { return c.semantic.g; });
    t["semantic.kappa"] = real([](C& c) -> double& { return c.semantic.kappa; });
    t["semantic.rho_min"] = real([](C& c) -> double& { return c.semantic.rho_min; });

    t["traffic.mean_arrival"] = real([](C& c) -> double& { return c.traffic.mean_arrival; });
    t["traffic.std_ratio"] = real([](C& c) -> double& { return c.traffic.std_ratio; });

    t["reward.b_max"] = real([](C& c) -> double& { return c.reward.b_max; });
    t["reward.lambda"] = real([](C& c) -> double& { return c.reward.lambda; });
    t["reward.window"] = count<std::size_t>([](C& c) -> std::size_t& { return c.reward.window; });
    t["reward.hinge"] = [](C& c, const std::string& k, const std::string& v) { c.reward.hinge = to_bool(k, v); };

    t["env.mode"] = [](C& c, const std::string& k, const std::string& v) {
      if (v == "deferrable") c.mode = slotopt::ExtractionMode::deferrable;
      else if (v == "realtime") c.mode = slotopt::ExtractionMode::realtime;
      else throw std::invalid_argument("config: " + k + " must be deferrable or realtime");
    };
    t["env.episode_length"] = count<std::size_t>([](C& c) -> std::size_t& { return c.episode_length; });
    t["env.action_scale"] = real(&C::action_scale);

    t["ppo.gamma"] = real([](C& c) -> double& { return c.ppo.gamma; });
    t["ppo.lambda"] = real([](C& c) -> double& { return c.ppo.lambda; });
    t["ppo.clip"] = real([](C& c) -> double& { return c.ppo.clip; });
    t["ppo.learning_rate"] = real([](C& c) -> double& { return c.ppo.learning_rate; });
    t["ppo.epochs"] = count<std::size_t>([](C& c) -> std::size_t& { return c.ppo.epochs; });
    t["ppo.minibatch"] = count<std::size_t>([](C& c) -> std::size_t& { return c.ppo.minibatch; });
    t["ppo.value_coef"] = real([](C& c) -> double& { return c.ppo.value_coef; });
    t["ppo.entropy_coef"] = real([](C& c) -> double& { return c.ppo.entropy_coef; });
    t["ppo.max_grad_norm"] = real([](C& c) -> double& { return c.ppo.max_grad_norm; });
    t["ppo.buffer"] = count<std::size_t>([](C& c) -> std::size_t& { return c.ppo.buffer_capacity; });
    t["ppo.scale_rewards"] = [](C& c, const std::string& k, const std::string& v) { c.ppo.scale_rewards = to_bool(k, v); };
    t["ppo.init_log_std"] = real([](C& c) -> double& { return c.ppo.init_log_std; });
    t["ppo.init_bernoulli_logit"] = real([](C& c) -> double& { return c.ppo.init_bernoulli_logit; });
    t["ppo.hidden"] = count<std::size_t>([](C& c) -> std::size_t& { return c.ppo.hidden; });

    t["run.scheme"] = [](C& c, const std::string&, const std::string& v) { c.scheme = v; };
    t["run.profile"] = [](C& c, const std::string&, const std::string& v) { c.profile = parse_profile(v); };
    t["run.seed"] = count<std::uint64_t>([](C& c) -> std::uint64_t& { return c.seed; });
    t["run.train_steps"] = count<std::size_t>([](C& c) -> std::size_t& { return c.train_steps; });
    t["run.stochastic_eval"] = [](C& c, const std::string& k, const std::string& v) { c.stochastic_eval = to_bool(k, v); };
    t["run.eval_episodes"] = count<std::size_t>([](C& c) -> std::size_t& { return c.eval_episodes; });
    t["run.seeds"] = count<std::size_t>([](C& c) -> std::size_t& { return c.seeds; });
    t["run.jtac_iters"] = count<std::size_t>([](C& c) -> std::size_t& { return c.jtac_iters; });
    t["run.jtac_eps"] = real(&C::jtac_eps);
    return t;
  }();
  return table;
}

}  // namespace

env::EnvConfig ExperimentConfig::env_config() const {
  env::EnvConfig e;
  e.geometry.ap = {0.0, 0.0};
  e.geometry.ris = {ris_x, ris_y};
  e.geometry.ris_elements = ris_elements;
  e.geometry.sus = channel::scatter_sus(num_sus, {su_center_x, su_center_y}, su_radius, layout_seed);
  e.fading = fading;
  e.system.radio.noise_power = dbm_to_watts(noise_dbm);
  e.system.radio.p_max = dbm_to_watts(p_max_dbm);
  e.system.radio.bandwidth = bandwidth_khz;
  e.system.radio.slot_duration = slot_seconds;
  e.system.radio.s_min = s_min;
  e.system.semantic = semantic;
  e.traffic = traffic;
  e.reward = reward;
  e.mode = mode;
  e.episode_length = episode_length;
  e.action_scale = action_scale;
  env::validate(e);
  return e;
}

void set_value(ExperimentConfig& config, const std::string& key, const std::string& value) {
  const auto& t = setters();
  const auto it = t.find(key);
  if (it == t.end()) throw std::invalid_argument("config: unknown key '" + key + "'");
  it->second(config, key, value);
}

std::vector<std::string> config_keys() {
  std::vector<std::string> keys;
  for (const auto& [k, _] : setters()) keys.push_back(k);
  return keys;
}

ExperimentConfig load_config(const std::string& path) { return load_config(path, ExperimentConfig{}); }

ExperimentConfig load_config(const std::string& path, ExperimentConfig base) {
  boost::property_tree::ptree tree;
  try {
    boost::property_tree::ini_parser::read_ini(path, tree);
  } catch (const boost::property_tree::ini_parser_error& e) {
    throw std::invalid_argument(std::string("config: ") + e.what());
  }
  for (const auto& [section, body] : tree) {
    if (body.empty()) throw std::invalid_argument("config: key '" + section + "' outside a section");
    for (const auto& [key, node] : body) set_value(base, section + "." + key, node.get_value<std::string>());
  }
  return base;
}

std::string to_string(slotopt::Profile p) { return p == slotopt::Profile::exact ? "exact" : "lightweight"; }

slotopt::Profile parse_profile(const std::string& text) {
  if (text == "exact") return slotopt::Profile::exact;
  if (text == "lightweight") return slotopt::Profile::lightweight;
  throw std::invalid_argument("profile must be exact or lightweight");
}

}  // namespace risnoma::harness
