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

#include "risnoma/harness/schemes.hpp"

namespace risnoma::harness {

/// Plot files written by emit_plotdata, one per figure.
const std::vector<std::string>& figure_names();

/// One row of `manifest.csv` in a run directory.
struct ManifestEntry {
  std::string figure;
  std::string scheme;
  std::string parameter;
  double value = 0.0;
  std::uint64_t seed = 0;
  std::string trace;        // relative to the run directory
  std::string curve;        // training curve, may be empty
  std::string convergence;  // JTAC iteration trace, may be empty
};

/// Writes the report's trace (and curves, when present) into `dir` and
/// appends a manifest row. Returns the row.
ManifestEntry record_report(const std::string& dir, const std::string& figure,
                            const RunReport& report, const std::string& parameter, double value);

std::vector<ManifestEntry> read_manifest(const std::string& dir);

/// A parsed numeric CSV with a header row.
struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;

  /// Index of `name` in the header; throws std::out_of_range if absent.
  std::size_t column(const std::string& name) const;
  bool has(const std::string& name) const;
};

CsvTable read_csv(const std::string& path);

/// Rebuilds every figure CSV in `plot_dir` from the traces listed in the
/// manifest of `run_dir`. Returns the paths written.
std::vector<std::string> emit_plotdata(const std::string& run_dir, const std::string& plot_dir);

}  // namespace risnoma::harness
