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

#include "narm/sampler.hpp"
#include "narm/synthetic.hpp"

namespace {

// One full Gibbs sweep on planted data; args are node count and factors.
void sweep_benchmark(benchmark::State& state, narm::ModelKind kind) {
  narm::PlantedConfig config;
  config.n_nodes = static_cast<std::size_t>(state.range(0));
  config.n_communities = 4;
  config.p_in = 20.0 / static_cast<double>(config.n_nodes);
  config.p_out = 1.0 / static_cast<double>(config.n_nodes);
  config.directedness = kind == narm::ModelKind::sym ? narm::Directedness::undirected
                                                     : narm::Directedness::directed;
  const auto data = narm::planted_partition(config);
  narm::ModelConfig model;
  model.kind = kind;
  model.n_factors = static_cast<std::size_t>(state.range(1));
  narm::Sampler sampler(model, data.network, data.attributes, nullptr, 1);
  for (int s = 0; s < 20; ++s) sampler.sweep();
  for (auto _ : state) sampler.sweep();
  state.counters["links"] = static_cast<double>(data.network.num_entries());
}

void BM_SymSweep(benchmark::State& state) { sweep_benchmark(state, narm::ModelKind::sym); }
void BM_AsymSweep(benchmark::State& state) { sweep_benchmark(state, narm::ModelKind::asym); }

BENCHMARK(BM_SymSweep)->Args({200, 10})->Args({1000, 10})->Args({1000, 50})
    ->Unit(benchmark::kMillisecond);
BENCHMARK(BM_AsymSweep)->Args({200, 10})->Args({1000, 10})->Args({1000, 50})
    ->Unit(benchmark::kMillisecond);

}  // namespace
BENCHMARK_MAIN();
