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

// Joint-distribution (Geweke) tests of the full samplers. The marginal side
// draws parameters and data by forward simulation; the successive side
// alternates a data draw given the parameters with one Gibbs sweep. Both
// sample the same joint distribution iff every conditional is right.

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "narm/data.hpp"
#include "narm/model.hpp"

namespace narm::testing {

struct GewekeStat {
  std::string name;
  double marginal_mean = 0.0;
  double marginal_se = 0.0;
  double successive_mean = 0.0;
  double successive_se = 0.0;

  double z() const;
  bool pass(double limit = 4.0) const;
};

struct GewekeConfig {
  std::size_t draws = 500000;  // per side; the toy chains mix over thousands of sweeps
  std::uint64_t seed = 1;
  SamplerOptions options;
  bool hierarchy = false;  // one parent over both toy attributes
  // Gamma rate of the attribute factors. Under a hierarchy h(l, k) has shape
  // near 1 and mean 1 / mu0; mu0 = 1 then puts enough mass on shapes near
  // zero that g falls below its floor, which the samplers only handle
  // approximately, so the hierarchical tests use a larger value.
  double mu0 = 1.0;
};

/// N = 6, K = 2, L = 2 toy models.
std::vector<GewekeStat> sym_geweke(const GewekeConfig& config);
/// The directed toy ignores options.resample_hypers: with random c0 and
/// epsilon, q gets so close to 1 that the latent counts overflow. Those
/// updates are checked one conditional at a time instead.
std::vector<GewekeStat> asym_geweke(const GewekeConfig& config);

/// The toy attribute matrix (6 x 2) and its one-parent hierarchy (2 x 1).
AttributeMatrix toy_attributes();
AttributeMatrix toy_parents();

std::string describe(const GewekeStat& stat);

}  // namespace narm::testing
