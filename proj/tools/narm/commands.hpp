// Copyright 2026 The narm Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "config.hpp"
#include "json.hpp"
#include "narm/model.hpp"

namespace narm::cli {

enum ExitCode : int {
  kExitOk = 0,
  kExitFailure = 1,
  kExitConfig = 2,
  kExitData = 3,
  kExitNumerical = 4,
};

/// Parses arguments, dispatches to a command and maps errors to exit codes.
int run(int argc, const char* const* argv);

struct FitSummary {
  std::size_t sweeps = 0;
  double log_likelihood = 0.0;
  std::filesystem::path snapshot;
};

/// Fits on every link of the input network with the first seed. Writes
/// snapshot.tsv, trace.csv and config.txt into the output directory.
FitSummary cmd_fit(const RunConfig& config);

/// One fold per seed: split, fit, score. Writes metrics.jsonl (one record per
/// fold plus an aggregate record), metrics.timing.jsonl, a split manifest and
/// a trace per fold. Returns the metric records.
std::vector<nlohmann::json> cmd_eval(const RunConfig& config);

/// Scores "i j" pairs from a snapshot; writes "i j probability" lines.
void cmd_predict(const std::filesystem::path& snapshot, const std::filesystem::path& pairs,
                 const std::filesystem::path& out);

struct SimulateOptions {
  std::string generator = "model";  // model | planted | hierarchy
  std::size_t nodes = 100;
  std::size_t attrs = 10;         // model generator: attribute columns
  double attr_density = 0.2;      // model generator: P(F(i, l) = 1)
  std::size_t parents = 0;        // model generator: second-level attributes
  std::size_t communities = 4;    // planted generators
  double p_in = 0.3;
  double p_out = 0.02;
  std::size_t attrs_per_community = 2;
  double attr_on = 0.8;
  double attr_noise = 0.05;
};

/// Writes edges.txt and attributes.txt, plus hierarchy.txt when the data
/// have a second level, truth.tsv (model generator) or communities.txt
/// (planted generators).
void cmd_simulate(const RunConfig& config, const SimulateOptions& options);

struct BenchOptions {
  std::size_t nodes = 2000;
  std::size_t factors = 10;
  std::size_t base_edges = 3000;
  std::size_t base_attrs = 50;
  std::size_t attr_activity = 40;  // nodes per attribute
  std::size_t doublings = 2;
  std::size_t sweeps = 10;
  std::size_t warmup = 2;
};

struct BenchPoint {
  std::size_t size = 0;  // edges or attributes
  double sweep_seconds = 0.0;
  std::array<double, kNumPhases> phase_seconds{};
};

struct BenchReport {
  std::vector<BenchPoint> edge_grid;  // fixed N, K, L; edges doubling
  std::vector<BenchPoint> attr_grid;  // fixed N, K, edges, activity; L doubling
  /// Largest time ratio across one doubling: whole sweep for the edge grid,
  /// attribute phase for the attribute grid.
  double edge_doubling_ratio = 0.0;
  double attr_doubling_ratio = 0.0;
  /// Least-squares log-log slopes.
  double edge_exponent = 0.0;
  double attr_exponent = 0.0;
};

/// Median per-sweep times over random networks of growing size.
BenchReport run_bench(const RunConfig& config, const BenchOptions& options);
nlohmann::json to_json(const BenchReport& report);

}  // namespace narm::cli
