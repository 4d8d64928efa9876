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

#include "stats.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include <boost/math/distributions/chi_squared.hpp>

namespace narm::testing {

double mean(std::span<const double> xs) {
  return std::accumulate(xs.begin(), xs.end(), 0.0) / static_cast<double>(xs.size());
}

double variance(std::span<const double> xs) {
  const double m = mean(xs);
  double ss = 0.0;
  for (double x : xs) ss += (x - m) * (x - m);
  return ss / static_cast<double>(xs.size() - 1);
}

double batch_means_se(std::span<const double> series, std::size_t batches) {
  const std::size_t n = series.size();
  if (batches == 0) batches = std::max<std::size_t>(20, static_cast<std::size_t>(std::sqrt(n)));
  const std::size_t size = n / batches;
  std::vector<double> means(batches);
  for (std::size_t b = 0; b < batches; ++b) {
    means[b] = mean(series.subspan(b * size, size));
  }
  return std::sqrt(variance(means) / static_cast<double>(batches));
}

CheckResult mean_check(const std::string& name, std::span<const double> xs, double expected_mean,
                       double expected_sd, double limit) {
  const double m = mean(xs);
  const double se = expected_sd / std::sqrt(static_cast<double>(xs.size()));
  const double z = (m - expected_mean) / se;
  std::ostringstream detail;
  detail << "mean " << m << " expected " << expected_mean << " z " << z;
  return {name, std::abs(z) < limit, detail.str()};
}

double chi_square_pvalue(const std::vector<long long>& samples, const std::vector<double>& probs,
                         long long offset) {
  const std::size_t bins = probs.size() + 1;  // last bin: the upper tail
  std::vector<double> observed(bins, 0.0);
  std::vector<double> expected(bins, 0.0);
  const double n = static_cast<double>(samples.size());
  double covered = 0.0;
  for (std::size_t b = 0; b < probs.size(); ++b) {
    expected[b] = probs[b] * n;
    covered += probs[b];
  }
  expected[bins - 1] = std::max(0.0, 1.0 - covered) * n;
  for (long long s : samples) {
    const long long idx = s - offset;
    if (idx < 0) {
      observed[0] += 1.0;  // impossible value: lands in a bin with its own expectation
    } else {
      observed[std::min<std::size_t>(static_cast<std::size_t>(idx), bins - 1)] += 1.0;
    }
  }
  // Pool sparse bins left to right.
  std::vector<double> obs;
  std::vector<double> exp;
  double acc_o = 0.0;
  double acc_e = 0.0;
  for (std::size_t b = 0; b < bins; ++b) {
    acc_o += observed[b];
    acc_e += expected[b];
    if (acc_e >= 5.0) {
      obs.push_back(acc_o);
      exp.push_back(acc_e);
      acc_o = acc_e = 0.0;
    }
  }
  if (acc_e > 0.0 || acc_o > 0.0) {
    if (exp.empty()) return acc_o == acc_e ? 1.0 : 0.0;
    obs.back() += acc_o;
    exp.back() += acc_e;
  }
  if (exp.size() < 2) return 1.0;
  double stat = 0.0;
  for (std::size_t b = 0; b < exp.size(); ++b) {
    if (exp[b] <= 0.0) {
      if (obs[b] > 0.0) return 0.0;
      continue;
    }
    stat += (obs[b] - exp[b]) * (obs[b] - exp[b]) / exp[b];
  }
  boost::math::chi_squared dist(static_cast<double>(exp.size() - 1));
  return boost::math::cdf(boost::math::complement(dist, stat));
}

double ks_pvalue(std::vector<double> samples, const std::function<double(double)>& cdf) {
  std::sort(samples.begin(), samples.end());
  const double n = static_cast<double>(samples.size());
  double d = 0.0;
  for (std::size_t k = 0; k < samples.size(); ++k) {
    const double f = cdf(samples[k]);
    d = std::max({d, f - static_cast<double>(k) / n, static_cast<double>(k + 1) / n - f});
  }
  const double lambda = (std::sqrt(n) + 0.12 + 0.11 / std::sqrt(n)) * d;
  if (lambda < 0.2) return 1.0;  // the series is 1 to double precision
  double p = 0.0;
  for (int j = 1; j <= 100; ++j) {
    const double term = 2.0 * ((j % 2 == 1) ? 1.0 : -1.0) * std::exp(-2.0 * j * j * lambda * lambda);
    p += term;
    if (std::abs(term) < 1e-12) break;
  }
  return std::clamp(p, 0.0, 1.0);
}

std::vector<std::vector<double>> stirling_first(std::size_t max_n) {
  std::vector<std::vector<double>> s(max_n + 1, std::vector<double>(max_n + 1, 0.0));
  s[0][0] = 1.0;
  for (std::size_t n = 1; n <= max_n; ++n) {
    for (std::size_t k = 1; k <= n; ++k) {
      s[n][k] = static_cast<double>(n - 1) * s[n - 1][k] + s[n - 1][k - 1];
    }
  }
  return s;
}

}  // namespace narm::testing
