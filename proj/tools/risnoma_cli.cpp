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

// Command-line front end: run, sweep, bench, export.

#include <cstdio>
#include <exception>
#include <filesystem>
#include <fstream>
#include <string>
#include <utility>
#include <vector>

#include <CLI11.hpp>
#include <spdlog/spdlog.h>

#include "risnoma/harness/config.hpp"
#include "risnoma/harness/plotdata.hpp"
#include "risnoma/harness/schemes.hpp"
#include "risnoma/ppo/checkpoint.hpp"

namespace h = risnoma::harness;

namespace {

struct Common {
  std::string config;
  std::string scheme;
  std::string profile;
  long long seed = -1;
  std::string out = "runs";
  std::vector<std::string> overrides;
};

void add_common(CLI::App* app, Common& c) {
  app->add_option("--config", c.config, "INI configuration file")->check(CLI::ExistingFile);
  app->add_option("--scheme", c.scheme, "scheme name");
  app->add_option("--seed", c.seed, "base seed");
  app->add_option("--profile", c.profile, "optimizer profile: exact|lightweight");
  app->add_option("--out", c.out, "output directory");
  app->add_option("--set", c.overrides, "section.key=value override (repeatable)");
}

h::ExperimentConfig resolve(const Common& c) {
  h::ExperimentConfig cfg = c.config.empty() ? h::ExperimentConfig{} : h::load_config(c.config);
  for (const auto& kv : c.overrides) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos) throw std::invalid_argument("--set expects section.key=value");
    h::set_value(cfg, kv.substr(0, eq), kv.substr(eq + 1));
  }
  if (!c.scheme.empty()) cfg.scheme = c.scheme;
  if (!c.profile.empty()) cfg.profile = h::parse_profile(c.profile);
  if (c.seed >= 0) cfg.seed = static_cast<std::uint64_t>(c.seed);
  h::parse_scheme(cfg.scheme);
  return cfg;
}

std::string default_figure(const h::ExperimentConfig& cfg) {
  return h::is_learning(h::parse_scheme(cfg.scheme)) ? "fig3_learning" : "fig2_convergence";
}

std::string sweep_figure(const std::string& parameter) {
  if (parameter == "L" || parameter == "ris_x") return "fig4_ris";
  if (parameter == "arrival") return "fig5_deferrable";
  return "fig6_scaling";
}

void print_report(const h::RunReport& r) {
  std::printf("%s seed=%llu eta_hat=%.6g reward=%.6g trailing=%.6g raw=%.4g sem=%.4g "
              "compliance=%.4f decision_s=%.3g\n",
              r.scheme.c_str(), static_cast<unsigned long long>(r.seed), r.mean_eta_hat,
              r.mean_reward, r.trailing_reward, r.mean_raw_backlog, r.mean_sem_backlog,
              r.backlog_compliance, r.mean_decision_seconds);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"RIS-assisted semantic NOMA uplink simulator"};
  app.require_subcommand(1);

  Common run_opts, sweep_opts, bench_opts;
  std::string run_figure, sweep_figure_name;
  std::string sweep_param;
  std::vector<double> sweep_values;
  std::size_t bench_slots = 200;
  std::vector<std::size_t> bench_L{10, 70};
  std::string export_plots;

  auto* run = app.add_subcommand("run", "train (if needed) and evaluate one scheme");
  add_common(run, run_opts);
  run->add_option("--figure", run_figure, "figure tag recorded in the manifest");

  auto* sw = app.add_subcommand("sweep", "run one scheme across a parameter grid, paired seeds");
  add_common(sw, sweep_opts);
  sw->add_option("--param", sweep_param, "L | ris_x | arrival | K | noise")->required();
  sw->add_option("--values", sweep_values, "values to sweep")->required()->expected(1, -1);
  sw->add_option("--figure", sweep_figure_name, "figure tag recorded in the manifest");

  auto* be = app.add_subcommand("bench", "per-step decision time (policy forward + dispatch)");
  add_common(be, bench_opts);
  be->add_option("--slots", bench_slots, "slots per measurement");
  be->add_option("--L", bench_L, "RIS sizes")->expected(1, -1);

  std::string export_dir = "runs";
  auto* ex = app.add_subcommand("export", "rebuild figure CSVs from the traces in a run directory");
  ex->add_option("--out", export_dir, "run directory holding manifest.csv");
  ex->add_option("--plots", export_plots, "destination (default: <out>/plotdata)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  try {
    if (*run) {
      const auto cfg = resolve(run_opts);
      const auto report = h::run_scheme(cfg);
      print_report(report);
      const auto figure = run_figure.empty() ? default_figure(cfg) : run_figure;
      const auto entry = h::record_report(run_opts.out, figure, report, "seed", static_cast<double>(cfg.seed));
      std::printf("trace: %s\n", (std::filesystem::path(run_opts.out) / entry.trace).c_str());
      if (report.agent) {
        const auto stem = std::filesystem::path(run_opts.out) / (cfg.scheme + "_s" + std::to_string(cfg.seed));
        risnoma::ppo::save_checkpoint(stem.string() + ".ckpt", std::as_const(*report.agent).network().parameters());
        std::ofstream m(stem.string() + "_metrics.csv");
        m << "update,policy_loss,value_loss,entropy,approx_kl,clip_fraction,grad_norm,aborted\n";
        for (std::size_t i = 0; i < report.updates.size(); ++i) {
          const auto& u = report.updates[i];
          m << i << ',' << u.policy_loss << ',' << u.value_loss << ',' << u.entropy << ',' << u.approx_kl
            << ',' << u.clip_fraction << ',' << u.grad_norm << ',' << (u.aborted ? 1 : 0) << '\n';
        }
        std::printf("checkpoint: %s.ckpt\n", stem.c_str());
      }
    } else if (*sw) {
      const auto cfg = resolve(sweep_opts);
      const auto figure = sweep_figure_name.empty() ? sweep_figure(sweep_param) : sweep_figure_name;
      for (const auto& point : h::sweep(cfg, sweep_param, sweep_values))
        for (const auto& r : point.reports) {
          std::printf("%s=%g ", sweep_param.c_str(), point.value);
          print_report(r);
          h::record_report(sweep_opts.out, figure, r, sweep_param, point.value);
        }
    } else if (*be) {
      auto cfg = resolve(bench_opts);
      const std::vector<std::string> schemes =
          bench_opts.scheme.empty() ? std::vector<std::string>{"pdoo-lightweight", "pdoo", "all-selection"}
                                    : std::vector<std::string>{bench_opts.scheme};
      for (std::size_t L : bench_L)
        for (const auto& s : schemes) {
          auto c = cfg;
          c.scheme = s;
          c.ris_elements = L;
          h::RunReport r;
          r.scheme = s;
          r.seed = c.seed;
          const double mean = h::bench(c, bench_slots, &r.trace);
          h::summarize(r.trace, c.reward.b_max, r);
          std::printf("%s L=%zu mean_decision_s=%.6g\n", s.c_str(), L, mean);
          h::record_report(bench_opts.out, "table3_timing", r, "L", static_cast<double>(L));
        }
    } else if (*ex) {
      const auto plots = export_plots.empty() ? (std::filesystem::path(export_dir) / "plotdata").string() : export_plots;
      for (const auto& p : h::emit_plotdata(export_dir, plots)) std::printf("%s\n", p.c_str());
    }
  } catch (const std::exception& e) {
    spdlog::error("{}", e.what());
    return 1;
  }
  return 0;
}
