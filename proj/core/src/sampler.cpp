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

#include "narm/sampler.hpp"

#include <string>

#include "narm/errors.hpp"

namespace narm {
namespace {

std::variant<SymState, AsymState> initial_state(const ModelConfig& config,
                                                const SparseBinaryMatrix& links,
                                                const AttributeMatrix& F,
                                                const AttributeMatrix* parents,
                                                std::uint64_t seed) {
  if (config.kind == ModelKind::sym) {
    return sym_initialize(links, F, parents, config.n_factors, config.sym, config.options, seed);
  }
  return asym_initialize(links, F, parents, config.n_factors, config.asym, config.options, seed);
}

}  // namespace

Sampler::Sampler(const ModelConfig& config, const SparseBinaryMatrix& links,
                 const AttributeMatrix& attributes, const AttributeMatrix* parents,
                 std::uint64_t seed)
    : config_(config),
      links_(links),
      attributes_(attributes),
      parents_(parents != nullptr ? std::optional<AttributeMatrix>(*parents) : std::nullopt),
      rng_(seed, 2),
      state_(initial_state(config, links_, attributes_, parents_ ? &*parents_ : nullptr, seed)) {}

void Sampler::hold_out(std::span<const NodePair> pairs) {
  std::vector<NodePair> held;
  held.reserve(pairs.size());
  for (const auto& p : pairs) {
    if (p.row >= num_nodes() || p.col >= num_nodes() || p.row == p.col) {
      throw DataError("held-out pair (" + std::to_string(p.row) + ", " + std::to_string(p.col) +
                      ") is not a valid off-diagonal pair");
    }
    if (links_.contains(p.row, p.col)) {
      throw DataError("held-out pair (" + std::to_string(p.row) + ", " + std::to_string(p.col) +
                      ") is a training link");
    }
    held.push_back(p);
  }
  std::visit([&](auto& s) { s.held_out = std::move(held); }, state_);
}

void Sampler::sweep(SweepStats* stats) {
  if (auto* s = std::get_if<SymState>(&state_)) {
    sym_sweep(*s, links_, attributes_, rng_, config_.options, stats);
  } else {
    asym_sweep(std::get<AsymState>(state_), links_, attributes_, rng_, config_.options, stats);
  }
}

std::size_t Sampler::sweeps() const {
  return std::visit([](const auto& s) { return s.sweeps; }, state_);
}

double Sampler::link_probability(std::size_t i, std::size_t j) const {
  if (const auto* s = sym()) return sym_link_probability(s->phi, s->lambda, i, j);
  const auto& a = std::get<AsymState>(state_);
  return asym_link_probability(a.phi, a.theta, i, j);
}

double Sampler::log_likelihood() const {
  if (const auto* s = sym()) return sym_log_likelihood(*s, links_);
  return asym_log_likelihood(std::get<AsymState>(state_), links_);
}

double Sampler::block_mass() const {
  double total = 0.0;
  if (const auto* s = sym()) {
    for (double v : s->lambda.values()) total += v;
  } else {
    for (double v : std::get<AsymState>(state_).q) total += v;
  }
  return total;
}

const AttributePriorState& Sampler::prior() const {
  return std::visit([](const auto& s) -> const AttributePriorState& { return s.prior; }, state_);
}

}  // namespace narm
