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

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "narm/data.hpp"
#include "narm/evaluation.hpp"
#include "narm/sampler.hpp"

namespace CLI {
class App;
}

namespace narm::cli {

/// Flat run configuration. Every field is a command-line option and may also
/// be given as a key=value line in a --config file; flags win over the file.
struct RunConfig {
  std::string model = "sym";
  std::string edges;
  std::string attributes;
  std::string hierarchy;
  std::optional<std::size_t> num_nodes;

  std::size_t k_max = 50;
  double mu0 = 1.0;
  double gamma0 = 1.0;
  std::optional<double> epsilon;  // 1 for sym, 0.5 for asym
  double c0 = 1.0;
  double a0 = 1.0;
  double e0 = 1.0;
  double f0 = 1.0;

  std::optional<std::size_t> sweeps;   // model default when unset
  std::optional<std::size_t> burn_in;  // model default when unset

  std::string split_mode = "by_links";
  double train_fraction = 0.8;
  bool all_negatives = false;
  std::vector<std::uint64_t> seeds{1};

  bool attributes_enabled = true;
  bool hierarchy_enabled = false;
  bool resample_hypers = false;
  bool compat_crt_index = false;
  bool parallel = false;
  unsigned threads = 0;
  std::string shape_update = "corrected";

  std::string out = "narm-out";
  std::size_t snapshot_every = 0;  // 0: final snapshot only
  std::size_t trace_every = 10;
};

void register_run_options(CLI::App& app, RunConfig& config);

/// Validated, typed view of a RunConfig.
struct ResolvedConfig {
  ModelConfig model;
  McmcSchedule schedule;
  SplitSpec split;  // seed filled in per fold
  Directedness directedness = Directedness::undirected;
};

/// Throws ConfigError naming the offending field.
ResolvedConfig resolve(const RunConfig& config);

/// Sorted key=value lines of every resolved setting.
std::string canonical_text(const RunConfig& config);
/// 16 hex digits of FNV-1a over canonical_text.
std::string config_hash(const RunConfig& config);

struct Inputs {
  SparseBinaryMatrix network;
  AttributeMatrix attributes;  // zero columns when attributes are disabled
  std::optional<AttributeMatrix> parents;
};

/// Loads the files named by the config. Missing paths for enabled features
/// are reported as ConfigError before anything is read.
Inputs load_inputs(const RunConfig& config, const ResolvedConfig& resolved);

}  // namespace narm::cli
