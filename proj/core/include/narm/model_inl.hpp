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

#include <cmath>
#include <random>

namespace narm {

template <typename LogTarget>
double log_space_mh_step(double value, double step, LogTarget&& log_target,
                         RngStream& rng) {
  std::normal_distribution<double> normal(0.0, step);
  const double proposal = value * std::exp(normal(rng));
  // The log(value) Jacobian makes the walk symmetric in log space.
  const double log_accept = log_target(proposal) + std::log(proposal) -
                            log_target(value) - std::log(value);
  if (std::log(rng.uniform()) < log_accept) return proposal;
  return value;
}

}  // namespace narm
