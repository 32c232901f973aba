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

#include "risnoma/harness/plotdata.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>
#include <tuple>

namespace risnoma::harness {

namespace fs = std::filesystem;

namespace {

constexpr const char* kManifest = "manifest.csv";
constexpr const char* kManifestHeader = "figure,scheme,parameter,value,seed,trace,curve,convergence";

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream in(line);
  while (std::getline(in, cell, ',')) out.push_back(cell);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

std::string format_value(double v) {
  std::ostringstream s;
  s.precision(10);
  s << v;
  return s.str();
}

void write_series(const std::string& path, const char* index_name, const char* value_name,
                  const std::vector<double>& values) {
  std::ofstream f(path);
  if (!f) throw std::runtime_error("cannot open " + path);
  f.precision(12);
  f << index_name << ',' << value_name << '\n';
  for (std::size_t i = 0; i < values.size(); ++i) f << i << ',' << values[i] << '\n';
}

struct Stats {
  double mean = 0.0;
  double std = 0.0;
  std::size_t n = 0;
};

Stats stats(const std::vector<double>& v) {
  Stats s;
  s.n = v.size();
  if (v.empty()) return s;
  for (double x : v) s.mean += x;
  s.mean /= static_cast<double>(v.size());
  if (v.size() > 1) {
    double ss = 0.0;
    for (double x : v) ss += (x - s.mean) * (x - s.mean);
    s.std = std::sqrt(ss / static_cast<double>(v.size() - 1));
  }
  return s;
}

std::size_t count_sus(const CsvTable& t) {
  std::size_t k = 0;
  while (t.has("raw_" + std::to_string(k))) ++k;
  return k;
}

double column_mean(const CsvTable& t, const std::string& name) {
  if (t.rows.empty()) return 0.0;
  const std::size_t c = t.column(name);
  double s = 0.0;
  for (const auto& r : t.rows) s += r[c];
  return s / static_cast<double>(t.rows.size());
}

double per_su_mean(const CsvTable& t, const std::string& prefix) {
  const std::size_t K = count_sus(t);
  if (K == 0 || t.rows.empty()) return 0.0;
  double s = 0.0;
  for (std::size_t k = 0; k < K; ++k) s += column_mean(t, prefix + std::to_string(k));
  return s / static_cast<double>(K);
}

using GroupKey = std::tuple<std::string, std::string, double>;

std::ofstream open_out(const std::string& path) {
  std::ofstream f(path);
  if (!f) throw std::runtime_error("cannot open " + path);
  f.precision(10);
  return f;
}

void emit_metrics(const std::string& run_dir, const std::vector<ManifestEntry>& entries,
                  const std::string& figure, const std::string& path) {
  static const std::vector<std::string> metrics{"eta_hat", "eta_hat_per_su", "reward", "raw_backlog",
                                                "sem_backlog", "decision_seconds"};
  std::map<GroupKey, std::map<std::string, std::vector<double>>> groups;
  for (const auto& e : entries) {
    if (e.figure != figure) continue;
    const auto t = read_csv((fs::path(run_dir) / e.trace).string());
    auto& g = groups[{e.scheme, e.parameter, e.value}];
    const double eta = column_mean(t, "eta_hat");
    const std::size_t K = count_sus(t);
    g["eta_hat"].push_back(eta);
    g["eta_hat_per_su"].push_back(K ? eta / static_cast<double>(K) : 0.0);
    g["reward"].push_back(column_mean(t, "reward"));
    g["raw_backlog"].push_back(per_su_mean(t, "raw_"));
    g["sem_backlog"].push_back(per_su_mean(t, "sem_"));
    g["decision_seconds"].push_back(column_mean(t, "decision_seconds"));
  }
  auto f = open_out(path);
  f << "scheme,parameter,value,metric,mean,std,n\n";
  for (const auto& [key, by_metric] : groups)
    for (const auto& m : metrics) {
      const auto s = stats(by_metric.at(m));
      f << std::get<0>(key) << ',' << std::get<1>(key) << ',' << format_value(std::get<2>(key)) << ','
        << m << ',' << s.mean << ',' << s.std << ',' << s.n << '\n';
    }
}

void emit_series(const std::string& run_dir, const std::vector<ManifestEntry>& entries,
                 const std::string& figure, bool convergence, const std::string& path) {
  std::map<std::string, std::vector<std::vector<double>>> by_scheme;
  for (const auto& e : entries) {
    if (e.figure != figure) continue;
    const std::string& file = convergence ? e.convergence : e.curve;
    if (file.empty()) continue;
    const auto t = read_csv((fs::path(run_dir) / file).string());
    std::vector<double> v;
    for (const auto& r : t.rows) v.push_back(r.at(1));
    by_scheme[e.scheme].push_back(std::move(v));
  }
  auto f = open_out(path);
  f << "scheme," << (convergence ? "iteration" : "episode") << ",mean,std,n\n";
  for (const auto& [scheme, runs] : by_scheme) {
    std::size_t len = 0;
    for (const auto& r : runs) len = std::max(len, r.size());
    for (std::size_t i = 0; i < len; ++i) {
      std::vector<double> at;
      for (const auto& r : runs)
        if (i < r.size()) at.push_back(r[i]);
      const auto s = stats(at);
      f << scheme << ',' << i << ',' << s.mean << ',' << s.std << ',' << s.n << '\n';
    }
  }
}

void emit_behavior(const std::string& run_dir, const std::vector<ManifestEntry>& entries,
                   const std::string& path) {
  constexpr std::size_t kBuckets = 8;
  struct Sample {
    double arrival, rho, extract;
  };
  std::map<std::string, std::vector<Sample>> by_scheme;
  for (const auto& e : entries) {
    if (e.figure != "fig7_behavior") continue;
    const auto t = read_csv((fs::path(run_dir) / e.trace).string());
    const std::size_t K = count_sus(t);
    for (const auto& r : t.rows)
      for (std::size_t k = 0; k < K; ++k) {
        const auto sk = std::to_string(k);
        by_scheme[e.scheme].push_back(
            {r[t.column("arrival_" + sk)], r[t.column("rho_" + sk)], r[t.column("extract_" + sk)]});
      }
  }
  auto f = open_out(path);
  f << "scheme,bucket_low,bucket_high,mean_rho,mean_extract,n\n";
  for (const auto& [scheme, samples] : by_scheme) {
    if (samples.empty()) continue;
    double lo = samples.front().arrival, hi = lo;
    for (const auto& s : samples) {
      lo = std::min(lo, s.arrival);
      hi = std::max(hi, s.arrival);
    }
    const double width = hi > lo ? (hi - lo) / kBuckets : 1.0;
    std::vector<double> rho(kBuckets, 0.0), ext(kBuckets, 0.0);
    std::vector<std::size_t> n(kBuckets, 0);
    for (const auto& s : samples) {
      const auto b = std::min<std::size_t>(kBuckets - 1, static_cast<std::size_t>((s.arrival - lo) / width));
      rho[b] += s.rho;
      ext[b] += s.extract;
      ++n[b];
    }
    for (std::size_t b = 0; b < kBuckets; ++b) {
      if (!n[b]) continue;
      f << scheme << ',' << lo + b * width << ',' << lo + (b + 1) * width << ',' << rho[b] / n[b]
        << ',' << ext[b] / n[b] << ',' << n[b] << '\n';
    }
  }
}

void emit_modes(const std::string& run_dir, const std::vector<ManifestEntry>& entries,
                const std::string& path) {
  std::map<GroupKey, std::array<double, 4>> counts;
  for (const auto& e : entries) {
    if (e.figure != "fig8_modes") continue;
    const auto t = read_csv((fs::path(run_dir) / e.trace).string());
    auto& c = counts[{e.scheme, e.parameter, e.value}];
    const std::size_t col = t.column("mode");
    for (const auto& r : t.rows) {
      const int m = std::clamp(static_cast<int>(r[col]), 1, 3);
      c[m] += 1.0;
      c[0] += 1.0;
    }
  }
  auto f = open_out(path);
  f << "scheme,parameter,value,mode,frequency,n\n";
  for (const auto& [key, c] : counts)
    for (int m = 1; m <= 3; ++m)
      f << std::get<0>(key) << ',' << std::get<1>(key) << ',' << format_value(std::get<2>(key)) << ','
        << m << ',' << (c[0] > 0 ? c[m] / c[0] : 0.0) << ',' << c[0] << '\n';
}

}  // namespace

const std::vector<std::string>& figure_names() {
  static const std::vector<std::string> names{
      "fig2_convergence", "fig3_learning", "fig4_ris",          "fig5_deferrable", "fig6_scaling",
      "fig7_behavior",    "fig8_modes",    "fig9_lightweight", "table3_timing"};
  return names;
}

std::size_t CsvTable::column(const std::string& name) const {
  const auto it = std::find(header.begin(), header.end(), name);
  if (it == header.end()) throw std::out_of_range("csv: no column '" + name + "'");
  return static_cast<std::size_t>(it - header.begin());
}

bool CsvTable::has(const std::string& name) const {
  return std::find(header.begin(), header.end(), name) != header.end();
}

CsvTable read_csv(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw std::runtime_error("cannot open " + path);
  CsvTable t;
  std::string line;
  if (!std::getline(f, line)) throw std::runtime_error("csv: missing header in " + path);
  t.header = split(line);
  while (std::getline(f, line)) {
    if (line.empty()) continue;
    const auto cells = split(line);
    if (cells.size() != t.header.size()) throw std::runtime_error("csv: ragged row in " + path);
    std::vector<double> row;
    row.reserve(cells.size());
    for (const auto& c : cells) {
      try {
        row.push_back(std::stod(c));
      } catch (const std::exception&) {
        throw std::runtime_error("csv: non-numeric cell '" + c + "' in " + path);
      }
    }
    t.rows.push_back(std::move(row));
  }
  return t;
}

ManifestEntry record_report(const std::string& dir, const std::string& figure,
                            const RunReport& report, const std::string& parameter, double value) {
  fs::create_directories(dir);
  ManifestEntry e{figure, report.scheme, parameter, value, report.seed, "", "", ""};
  const std::string stem = figure + "_" + report.scheme + "_" + parameter + "_" + format_value(value) +
                           "_s" + std::to_string(report.seed);
  e.trace = stem + "_trace.csv";
  report.trace.write_csv((fs::path(dir) / e.trace).string());
  if (!report.training_curve.empty()) {
    e.curve = stem + "_curve.csv";
    write_series((fs::path(dir) / e.curve).string(), "episode", "reward", report.training_curve);
  }
  if (!report.convergence.empty()) {
    e.convergence = stem + "_convergence.csv";
    write_series((fs::path(dir) / e.convergence).string(), "iteration", "eta", report.convergence);
  }
  const auto manifest = fs::path(dir) / kManifest;
  const bool fresh = !fs::exists(manifest);
  std::ofstream m(manifest, std::ios::app);
  if (!m) throw std::runtime_error("cannot open " + manifest.string());
  if (fresh) m << kManifestHeader << '\n';
  m << e.figure << ',' << e.scheme << ',' << e.parameter << ',' << format_value(e.value) << ','
    << e.seed << ',' << e.trace << ',' << e.curve << ',' << e.convergence << '\n';
  return e;
}

std::vector<ManifestEntry> read_manifest(const std::string& dir) {
  const auto path = fs::path(dir) / kManifest;
  std::ifstream f(path);
  if (!f) throw std::runtime_error("no manifest in " + dir);
  std::string line;
  std::getline(f, line);
  if (line != kManifestHeader) throw std::runtime_error("manifest: unexpected header in " + path.string());
  std::vector<ManifestEntry> out;
  while (std::getline(f, line)) {
    if (line.empty()) continue;
    const auto c = split(line);
    if (c.size() != 8) throw std::runtime_error("manifest: malformed row '" + line + "'");
    out.push_back({c[0], c[1], c[2], std::stod(c[3]), std::stoull(c[4]), c[5], c[6], c[7]});
  }
  return out;
}

std::vector<std::string> emit_plotdata(const std::string& run_dir, const std::string& plot_dir) {
  const auto entries = read_manifest(run_dir);
  fs::create_directories(plot_dir);
  std::vector<std::string> written;
  for (const auto& fig : figure_names()) {
    const std::string path = (fs::path(plot_dir) / (fig + ".csv")).string();
    if (fig == "fig2_convergence")
      emit_series(run_dir, entries, fig, true, path);
    else if (fig == "fig3_learning")
      emit_series(run_dir, entries, fig, false, path);
    else if (fig == "fig7_behavior")
      emit_behavior(run_dir, entries, path);
    else if (fig == "fig8_modes")
      emit_modes(run_dir, entries, path);
    else
      emit_metrics(run_dir, entries, fig, path);
    written.push_back(path);
  }
  return written;
}

}  // namespace risnoma::harness
