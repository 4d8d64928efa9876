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

#include "narm/distributions.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>

#include "narm/errors.hpp"

namespace narm {
namespace {

constexpr double kTinyShape = 0.05;
constexpr double kFloor = std::numeric_limits<double>::min();

bool positive_finite(double x) { return x > 0.0 && std::isfinite(x); }

// Categorical draws against a running cumulative sum are cheaper than the
// binomial chain when the total is small compared to the number of cells.
void allocate_by_categorical(long long total, std::span<const double> weights,
                             std::span<long long> out, RngStream& rng) {
  std::vector<double> cumulative(weights.size());
  std::partial_sum(weights.begin(), weights.end(), cumulative.begin());
  const double mass = cumulative.back();
  for (long long n = 0; n < total; ++n) {
    const double u = rng.uniform() * mass;
    auto it = std::upper_bound(cumulative.begin(), cumulative.end(), u);
    auto idx = static_cast<std::size_t>(it - cumulative.begin());
    if (idx >= weights.size()) idx = weights.size() - 1;
    // Skip zero-weight cells that share a cumulative value with a neighbour.
    while (weights[idx] <= 0.0 && idx > 0) --idx;
    ++out[idx];
  }
}

void allocate_by_binomials(long long total, std::span<const double> weights,
                           double mass, std::span<long long> out,
                           RngStream& rng) {
  long long remaining = total;
  double remaining_mass = mass;
  for (std::size_t k = 0; k + 1 < weights.size() && remaining > 0; ++k) {
    if (weights[k] <= 0.0) continue;
    const double p = std::clamp(weights[k] / remaining_mass, 0.0, 1.0);
    std::binomial_distribution<long long> binom(remaining, p);
    const long long draw = p >= 1.0 ? remaining : binom(rng);
    out[k] = draw;
    remaining -= draw;
    remaining_mass -= weights[k];
    if (remaining_mass <= 0.0) break;
  }
  if (remaining > 0) {
    // Remaining customers go to the last cell with positive weight.
    for (std::size_t k = weights.size(); k-- > 0;) {
      if (weights[k] > 0.0) {
        out[k] += remaining;
        break;
      }
    }
  }
}

}  // namespace

double sample_gamma(double shape, double rate, RngStream& rng) {
  NARM_EXPECTS(positive_finite(shape), "sample_gamma: shape must be > 0");
  NARM_EXPECTS(positive_finite(rate), "sample_gamma: rate must be > 0");
  if (shape < kTinyShape) {
    std::gamma_distribution<double> boosted(shape + 1.0, 1.0);
    const double log_draw = std::log(boosted(rng)) + std::log(rng.uniform()) / shape -
                            std::log(rate);
    return std::max(std::exp(log_draw), kFloor);
  }
  std::gamma_distribution<double> dist(shape, 1.0);
  return std::max(dist(rng) / rate, kFloor);
}

double sample_log_gamma(double shape, double rate, RngStream& rng) {
  NARM_EXPECTS(positive_finite(shape), "sample_log_gamma: shape must be > 0");
  NARM_EXPECTS(positive_finite(rate), "sample_log_gamma: rate must be > 0");
  if (shape < kTinyShape) {
    std::gamma_distribution<double> boosted(shape + 1.0, 1.0);
    return std::log(boosted(rng)) + std::log(rng.uniform()) / shape - std::log(rate);
  }
  std::gamma_distribution<double> dist(shape, 1.0);
  return std::log(std::max(dist(rng), kFloor)) - std::log(rate);
}

double sample_beta(double a, double b, RngStream& rng) {
  NARM_EXPECTS(positive_finite(a) && positive_finite(b),
               "sample_beta: parameters must be > 0");
  const double x = sample_gamma(a, 1.0, rng);
  const double y = sample_gamma(b, 1.0, rng);
  const double v = x / (x + y);
  return std::clamp(v, kFloor, std::nextafter(1.0, 0.0));
}

void sample_dirichlet(std::span<const double> alphas, std::span<double> out,
                      RngStream& rng) {
  NARM_EXPECTS(!alphas.empty() && alphas.size() == out.size(),
               "sample_dirichlet: size mismatch");
  double total = 0.0;
  for (std::size_t i = 0; i < alphas.size(); ++i) {
    NARM_EXPECTS(positive_finite(alphas[i]),
                 "sample_dirichlet: concentrations must be > 0");
    out[i] = sample_gamma(alphas[i], 1.0, rng);
    total += out[i];
  }
  for (double& v : out) v /= total;
}

std::vector<double> sample_dirichlet(std::span<const double> alphas,
                                     RngStream& rng) {
  std::vector<double> out(alphas.size());
  sample_dirichlet(alphas, out, rng);
  return out;
}

long long sample_poisson(double lambda, RngStream& rng) {
  NARM_EXPECTS(lambda >= 0.0 && std::isfinite(lambda),
               "sample_poisson: rate must be >= 0");
  if (lambda == 0.0) return 0;
  std::poisson_distribution<long long> dist(lambda);
  return dist(rng);
}

long long sample_ztp(double lambda, RngStream& rng) {
  NARM_EXPECTS(positive_finite(lambda), "sample_ztp: rate must be > 0");
  if (lambda >= 1.0) {
    std::poisson_distribution<long long> dist(lambda);
    for (;;) {
      const long long n = dist(rng);
      if (n >= 1) return n;
    }
  }
  // Inverse cdf of the truncated law; p(1) = lambda e^-lambda / (1 - e^-lambda).
  const double u = rng.uniform();
  double p = lambda * std::exp(-lambda) / -std::expm1(-lambda);
  double cdf = p;
  long long n = 1;
  while (u > cdf) {
    ++n;
    p *= lambda / static_cast<double>(n);
    if (p <= 0.0) break;
    cdf += p;
  }
  return n;
}

long long sample_crt(long long customers, double concentration, RngStream& rng,
                     CrtVariant variant) {
  NARM_EXPECTS(customers >= 0, "sample_crt: customer count must be >= 0");
  NARM_EXPECTS(positive_finite(concentration),
               "sample_crt: concentration must be > 0");
  const double offset = variant == CrtVariant::standard ? 1.0 : 0.0;
  // Customer i opens a new table with probability p(i), decreasing in i.
  const auto p = [&](long long i) {
    return concentration / (concentration + static_cast<double>(i) - offset);
  };
  long long tables = 0;
  long long i = 1;
  for (; i <= customers && p(i) > 0.25; ++i) {
    if (rng.uniform() <= p(i)) ++tables;
  }
  // The rest in blocks [i, 2i): propose customers at the block's largest
  // rate by geometric skips and keep each with probability p(j) / p(i).
  // The ratio stays above one half, so the work is about one proposal per
  // table per block, not one draw per customer.
  while (i <= customers) {
    const long long last = std::min(customers, 2 * i - 1);
    const double bound = p(i);
    std::geometric_distribution<long long> skip(bound);
    for (long long j = i + skip(rng); j <= last; j += 1 + skip(rng)) {
      if (rng.uniform() * bound <= p(j)) ++tables;
    }
    i = last + 1;
  }
  return tables;
}

void allocate_multinomial(long long total, std::span<const double> weights,
                          std::span<long long> out, RngStream& rng) {
  NARM_EXPECTS(total >= 0, "allocate_multinomial: total must be >= 0");
  NARM_EXPECTS(out.size() == weights.size() && !weights.empty(),
               "allocate_multinomial: size mismatch");
  std::fill(out.begin(), out.end(), 0);
  if (total == 0) return;
  double mass = 0.0;
  for (double w : weights) {
    NARM_EXPECTS(w >= 0.0 && std::isfinite(w),
                 "allocate_multinomial: weights must be non-negative");
    mass += w;
  }
  NARM_EXPECTS(mass > 0.0, "allocate_multinomial: all weights are zero");
  if (static_cast<std::size_t>(total) * 4 < weights.size() || total <= 4) {
    allocate_by_categorical(total, weights, out, rng);
  } else {
    allocate_by_binomials(total, weights, mass, out, rng);
  }
}

std::vector<long long> allocate_multinomial(long long total,
                                            std::span<const double> weights,
                                            RngStream& rng) {
  std::vector<long long> out(weights.size(), 0);
  allocate_multinomial(total, weights, out, rng);
  return out;
}

}  // namespace narm
