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

// Posterior snapshots and scalar traces.
//
// A snapshot is a text file of tab-separated blocks:
//
//     narm-snapshot	1
//     model	sym
//     sweep	3000
//     ...header scalars...
//     [phi]	100	4
//     <100 rows of 4 values>
//     [lambda]	4	4
//     ...
//
// Each block header names the block and gives its shape. Vectors are stored
// as one-row blocks. Values are written in shortest round-trip form, so a
// snapshot reloads bit-exactly.

#include <cstddef>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "narm/asym_narm.hpp"
#include "narm/evaluation.hpp"
#include "narm/matrix.hpp"
#include "narm/model.hpp"
#include "narm/sampler.hpp"
#include "narm/sym_narm.hpp"

namespace narm {

struct Snapshot {
  ModelKind kind = ModelKind::sym;
  std::map<std::string, double> scalars;    // sweep, K, N, L, M, hyper-parameters
  std::map<std::string, RealMatrix> blocks;  // phi, lambda/theta, r/q, c, H, b, delta

  const RealMatrix& block(const std::string& name) const;
  double scalar(const std::string& name) const;
  /// Link probability from the stored phi and lambda (sym) or theta (asym).
  double link_probability(std::size_t i, std::size_t j) const;
};

Snapshot make_snapshot(const SymState& state);
Snapshot make_snapshot(const AsymState& state);
Snapshot make_snapshot(const Sampler& sampler);

std::string format_snapshot(const Snapshot& snapshot);
/// Atomic write.
void write_snapshot(const std::filesystem::path& path, const Snapshot& snapshot);
/// Throws DataError on malformed input.
Snapshot read_snapshot(const std::filesystem::path& path);

/// CSV with columns sweep,log_likelihood,block_mass,seconds.
void write_trace_csv(const std::filesystem::path& path, const std::vector<TraceRow>& rows);

}  // namespace narm
