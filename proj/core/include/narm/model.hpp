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
#include <chrono>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include "narm/attribute_prior.hpp"
#include "narm/distributions.hpp"

namespace narm {

enum class ModelKind { sym, asym };

std::string_view to_string(ModelKind kind);
ModelKind parse_model_kind(std::string_view text);

/// Sampler switches shared by both models.
struct SamplerOptions {
  CrtVariant crt = CrtVariant::standard;
  /// Sym-side h/b and second-level updates. The directed model's h/b updates
  /// are exact in collapsed form and ignore this.
  ShapeUpdate shape_update = ShapeUpdate::corrected;
  /// Also resample gamma0/epsilon/c0 (sym) or a0/c0/epsilon (asym).
  bool resample_hypers = false;
  /// Split the count step across worker threads, each with its own stream.
  bool parallel = false;
  unsigned threads = 0;  // 0: hardware concurrency
  /// Full recompute of the shape cache every this many sweeps.
  std::size_t refresh_every = 100;
};

/// Latent counts of the observed links, stored sparsely: only cells with a
/// non-zero count are kept, so memory scales with the number of links.
struct LinkAllocations {
  std::vector<long long> totals;       // per link
  std::vector<std::size_t> offsets{0};  // per link, into cells/counts
  std::vector<std::uint32_t> cells;
  std::vector<long long> counts;

  void clear() {
    totals.clear();
    offsets.assign(1, 0);
    cells.clear();
    counts.clear();
  }
  std::size_t num_links() const { return totals.size(); }
  std::size_t stored_cells() const { return cells.size(); }
  std::span<const std::uint32_t> cells_of(std::size_t link) const {
    return {cells.data() + offsets[link], offsets[link + 1] - offsets[link]};
  }
  std::span<const long long> counts_of(std::size_t link) const {
    return {counts.data() + offsets[link], offsets[link + 1] - offsets[link]};
  }
};

enum class Phase : std::size_t {
  counts,
  tables,
  attributes,
  loadings,
  blocks,
  weights,
  hypers,
  kCount,
};
inline constexpr std::size_t kNumPhases = static_cast<std::size_t>(Phase::kCount);
std::string_view to_string(Phase phase);

struct SweepStats {
  /// Node pairs visited by the count step. Equals the number of training
  /// links; non-links are never visited.
  std::size_t pairs_touched = 0;
  std::size_t rate_floor_hits = 0;
  std::array<double, kNumPhases> seconds{};

  double total_seconds() const;
};

/// Accumulates wall time into SweepStats::seconds.
class PhaseClock {
 public:
  explicit PhaseClock(SweepStats* stats) : stats_(stats), last_(now()) {}
  void mark(Phase phase) {
    const auto t = now();
    if (stats_ != nullptr) {
      stats_->seconds[static_cast<std::size_t>(phase)] +=
          std::chrono::duration<double>(t - last_).count();
    }
    last_ = t;
  }

 private:
  static std::chrono::steady_clock::time_point now() {
    return std::chrono::steady_clock::now();
  }
  SweepStats* stats_;
  std::chrono::steady_clock::time_point last_;
};

/// Rates entering the zero-truncated Poisson are floored here.
inline constexpr double kRateFloor = 1e-300;

/// 1 - exp(-rate) without cancellation for small rates.
double link_probability_from_rate(double rate);

/// One random-walk Metropolis step on log(value) against `log_target`
/// (a function of the value itself). Returns the new value.
template <typename LogTarget>
double log_space_mh_step(double value, double step, LogTarget&& log_target,
                         RngStream& rng);

}  // namespace narm

#include "narm/model_inl.hpp"
