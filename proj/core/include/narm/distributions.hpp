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

#include <span>
#include <vector>

#include "narm/rng.hpp"

namespace narm {

// Random-variate primitives used by the Gibbs samplers. Gamma laws use the
// shape-rate parameterisation throughout (mean = shape / rate).

/// Draw from Gamma(shape, rate). Shapes below 0.05 are drawn in log space
/// (Gamma(shape + 1) * U^(1/shape)) and the result is floored at the smallest
/// normal double, so the draw is never exactly zero.
double sample_gamma(double shape, double rate, RngStream& rng);

/// log of a Gamma(shape, rate) draw, without the floor. Consumes the same
/// random numbers as sample_gamma and agrees with its log wherever the
/// floor is not hit.
double sample_log_gamma(double shape, double rate, RngStream& rng);

/// Draw from Beta(a, b); the result lies strictly inside (0, 1).
double sample_beta(double a, double b, RngStream& rng);

/// Draw a probability vector from Dirichlet(alphas) into `out`.
void sample_dirichlet(std::span<const double> alphas, std::span<double> out,
                      RngStream& rng);
std::vector<double> sample_dirichlet(std::span<const double> alphas,
                                     RngStream& rng);

/// Poisson draw (0 when lambda == 0).
long long sample_poisson(double lambda, RngStream& rng);

/// Zero-truncated Poisson: P(n) = lambda^n e^-lambda / (n! (1 - e^-lambda)),
/// n >= 1. Rejection from Poisson for lambda >= 1, inverse cdf below.
long long sample_ztp(double lambda, RngStream& rng);

/// Bernoulli index used by the table sampler. `standard` seats customer i
/// at a new table with probability g / (g + i - 1); `shifted` uses
/// g / (g + i), which does not reproduce the Stirling-number pmf.
enum class CrtVariant { standard, shifted };

/// Number of occupied tables after seating `customers` customers in a
/// Chinese restaurant process with the given concentration.
long long sample_crt(long long customers, double concentration, RngStream& rng,
                     CrtVariant variant = CrtVariant::standard);

/// Split `total` into Multinomial(total, weights / sum(weights)) counts.
void allocate_multinomial(long long total, std::span<const double> weights,
                          std::span<long long> out, RngStream& rng);
std::vector<long long> allocate_multinomial(long long total,
                                            std::span<const double> weights,
                                            RngStream& rng);

}  // namespace narm
