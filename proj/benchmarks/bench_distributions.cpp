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

#include <benchmark/benchmark.h>

#include <vector>

#include "narm/distributions.hpp"

namespace {

void BM_Gamma(benchmark::State& state) {
  narm::RngStream rng(1);
  const double shape = static_cast<double>(state.range(0)) / 100.0;
  for (auto _ : state) benchmark::DoNotOptimize(narm::sample_gamma(shape, 1.0, rng));
}
BENCHMARK(BM_Gamma)->Arg(1)->Arg(50)->Arg(500);

void BM_ZeroTruncatedPoisson(benchmark::State& state) {
  narm::RngStream rng(2);
  const double rate = static_cast<double>(state.range(0)) / 100.0;
  for (auto _ : state) benchmark::DoNotOptimize(narm::sample_ztp(rate, rng));
}
BENCHMARK(BM_ZeroTruncatedPoisson)->Arg(1)->Arg(100)->Arg(10000);

// Cost should grow with the number of tables, roughly g log n, not with n.
void BM_Crt(benchmark::State& state) {
  narm::RngStream rng(3);
  const long long customers = state.range(0);
  for (auto _ : state) benchmark::DoNotOptimize(narm::sample_crt(customers, 1.0, rng));
}
BENCHMARK(BM_Crt)->RangeMultiplier(100)->Range(10, 10'000'000);

void BM_Multinomial(benchmark::State& state) {
  narm::RngStream rng(4);
  const std::vector<double> weights(static_cast<std::size_t>(state.range(0)), 1.0);
  std::vector<long long> out(weights.size());
  for (auto _ : state) {
    narm::allocate_multinomial(1000, weights, out, rng);
    benchmark::DoNotOptimize(out.data());
  }
}
BENCHMARK(BM_Multinomial)->Arg(4)->Arg(64)->Arg(1024);

}  // namespace
