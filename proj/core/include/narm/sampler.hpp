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

// Model-agnostic front end over the two Gibbs samplers.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <variant>

#include "narm/asym_narm.hpp"
#include "narm/data.hpp"
#include "narm/model.hpp"
#include "narm/rng.hpp"
#include "narm/sym_narm.hpp"

namespace narm {

struct ModelConfig {
  ModelKind kind = ModelKind::sym;
  std::size_t n_factors = 10;
  SymHypers sym;
  AsymHypers asym;
  SamplerOptions options;
};

class Sampler {
 public:
  /// `links` must be undirected for the symmetric model and directed
  /// otherwise. `attributes` may have zero columns, which switches the
  /// attribute prior off. The inputs are copied.
  Sampler(const ModelConfig& config, const SparseBinaryMatrix& links,
          const AttributeMatrix& attributes, const AttributeMatrix* parents,
          std::uint64_t seed);

  /// Marks pairs as unobserved: they are neither links nor zeros of the
  /// training matrix, and their latent counts are imputed every sweep.
  /// Throws DataError on self pairs, out-of-range ids or training links.
  void hold_out(std::span<const NodePair> pairs);

  void sweep(SweepStats* stats = nullptr);

  ModelKind kind() const { return config_.kind; }
  std::size_t sweeps() const;
  std::size_t num_nodes() const { return links_.n_nodes(); }
  double link_probability(std::size_t i, std::size_t j) const;
  double log_likelihood() const;
  /// Sum of lambda (sym) or of q (asym); a cheap mixing diagnostic.
  double block_mass() const;

  const SymState* sym() const { return std::get_if<SymState>(&state_); }
  const AsymState* asym() const { return std::get_if<AsymState>(&state_); }
  const AttributePriorState& prior() const;
  const SparseBinaryMatrix& links() const { return links_; }
  const AttributeMatrix& attributes() const { return attributes_; }

 private:
  ModelConfig config_;
  SparseBinaryMatrix links_;
  AttributeMatrix attributes_;
  std::optional<AttributeMatrix> parents_;
  RngStream rng_;
  std::variant<SymState, AsymState> state_;
};

}  // namespace narm
