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

// Log-linear gamma-shape prior driven by binary node attributes.
//
// Every node factor loading phi(i, k) has gamma shape
//
//     g(i, k) = b(k) * prod_{l : F(i, l) = 1} h(l, k)
//
// so attributes shared by two nodes pull their loadings towards the same
// factors. h and b are updated by augmenting the negative-binomial likelihood
// of a node's factor count with Chinese-restaurant table counts T, which makes
// their conditionals gamma. Only the nodes on which an attribute is active are
// visited when its loading is updated.

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "narm/data.hpp"
#include "narm/distributions.hpp"
#include "narm/matrix.hpp"
#include "narm/rng.hpp"

namespace narm {

/// Shapes are floored here; the floor hits are counted.
inline constexpr double kShapeFloor = 1e-300;

/// How the shared-shape parameters (h, b, and the second-level loadings) are
/// drawn.
enum class ShapeUpdate {
  /// Draw directly from the table-augmented gamma conditional. Exact whenever
  /// node factor counts are conditionally independent across nodes (the
  /// directed model); an approximation otherwise.
  collapsed,
  /// Use the collapsed conditional as a Metropolis-Hastings proposal against
  /// the exact conditional given the loadings. Always exact.
  corrected,
};

/// Second level of a two-level attribute hierarchy.
struct HierarchyState {
  AttributeMatrix parents;  // F' (L x M)
  RealMatrix delta;         // M x K second-level loadings
  RealMatrix mu;            // L x K prior shapes of h: prod of parent deltas
  CountMatrix tables;       // L x K second-level table counts
};

struct PriorCounters {
  std::size_t h_node_touches = 0;
  std::size_t b_node_touches = 0;
  std::size_t shape_floor_hits = 0;
  std::size_t mh_proposals = 0;
  std::size_t mh_accepts = 0;
  std::size_t delta_proposals = 0;
  std::size_t delta_accepts = 0;
};

struct AttributePriorState {
  RealMatrix H;           // L x K attribute factor loadings
  std::vector<double> b;  // K attribute-free biases
  RealMatrix G;           // N x K cached shapes
  CountMatrix T;          // N x K table counts
  double mu0 = 1.0;
  std::optional<HierarchyState> hierarchy;
  PriorCounters counters;

  std::size_t num_nodes() const { return G.rows(); }
  std::size_t num_factors() const { return b.size(); }
  std::size_t num_attributes() const { return H.rows(); }
};

/// Collapsed "exposure" terms nu(i, k): integrating phi(i, k) out of its
/// Poisson counts leaves a factor exp(-g(i, k) * nu(i, k)).
struct RateSummary {
  RealMatrix nu;  // N x K, entries >= 0

  /// Directed model: nu(i, k) = -log(1 - q_k) for every node.
  static RateSummary from_scale_couplers(std::size_t n_nodes, std::span<const double> q);
};

/// Gamma law of phi(i, k) given its shape: Gamma(g(i, k), node_rate[i]).
/// Supplied to the corrected update, which needs the exact conditional.
struct LoadingLaw {
  const RealMatrix& log_loading;  // log phi, exact where phi sits on the floor
  std::span<const double> node_rate;
};

struct GammaParams {
  double shape = 1.0;
  double rate = 1.0;
};

struct PriorSweepOptions {
  CrtVariant crt = CrtVariant::standard;
  ShapeUpdate update = ShapeUpdate::collapsed;
};

/// Draws b, H (and the hierarchy, when `parents` is given) from the prior and
/// fills the shape cache. T starts at zero.
AttributePriorState init_attribute_prior(const AttributeMatrix& F, std::size_t n_factors,
                                         double mu0,
                                         const AttributeMatrix* parents, RngStream& rng);

/// g(i, k) = b(k) * prod over node i's active attributes of h(l, k).
RealMatrix compute_g(const RealMatrix& H, std::span<const double> b,
                     const AttributeMatrix& F, std::size_t* floor_hits = nullptr);
/// Recomputes the cache from scratch.
void refresh_g(AttributePriorState& state, const AttributeMatrix& F);

/// T(i, k) ~ CRT(counts(i, k), G(i, k)); zero counts are skipped.
void sample_tables(const CountMatrix& node_counts, const RealMatrix& G, CountMatrix& T,
                   RngStream& rng, CrtVariant variant = CrtVariant::standard);

/// Gamma conditional of h(l, k) given the tables:
///   shape = prior_shape + sum_{i: F(i,l)=1} T(i, k)
///   rate  = prior_rate  + sum_{i: F(i,l)=1} nu(i, k) * g(i, k) / h(l, k)
/// where the quotient is formed without dividing once values near the floor.
GammaParams h_conditional(const AttributePriorState& state, const AttributeMatrix& F,
                          const RateSummary& rates, std::size_t l, std::size_t k,
                          GammaParams prior);
/// Same for b(k), which behaves as an attribute active on every node.
GammaParams b_conditional(const AttributePriorState& state, const AttributeMatrix& F,
                          const RateSummary& rates, std::size_t k);

/// Prior of h(l, k): Gamma(mu0, mu0), or Gamma(mu(l, k), mu0) with a hierarchy.
GammaParams h_prior(const AttributePriorState& state, std::size_t l, std::size_t k);

/// Rescales g(i, k) by new_h / old_h for the nodes carrying attribute l.
/// sample_h rebuilds the same entries from the other factors instead, which
/// stays exact when old_h sits near the floor.
void update_g_after_h(std::size_t l, std::size_t k, double old_h, double new_h,
                      const AttributeMatrix& F, RealMatrix& G,
                      std::size_t* floor_hits = nullptr);

/// Resamples h(l, k) and updates the cache. `law` is required for
/// ShapeUpdate::corrected and ignored otherwise. Returns the new value.
double sample_h(AttributePriorState& state, const AttributeMatrix& F,
                const CountMatrix& node_counts, const RateSummary& rates,
                std::size_t l, std::size_t k, RngStream& rng,
                const PriorSweepOptions& options = {}, const LoadingLaw* law = nullptr);

/// Resamples b(k) and updates the cache.
double sample_b(AttributePriorState& state, const AttributeMatrix& F,
                const CountMatrix& node_counts, const RateSummary& rates, std::size_t k,
                RngStream& rng,
                const PriorSweepOptions& options = {}, const LoadingLaw* law = nullptr);

/// Second-level update: tables t'(l, k) ~ CRT(sum_i T(i, k), mu(l, k)), then
/// every delta(m, k), then mu. No-op without a hierarchy.
void sample_hierarchy(AttributePriorState& state, const AttributeMatrix& F,
                      const RateSummary& rates, RngStream& rng,
                      const PriorSweepOptions& options = {});

/// One pass over the prior: T, hierarchy, every h(l, k), every b(k).
void sweep_attribute_prior(AttributePriorState& state, const AttributeMatrix& F,
                           const CountMatrix& node_counts, const RateSummary& rates,
                           RngStream& rng, const PriorSweepOptions& options = {},
                           const LoadingLaw* law = nullptr);

/// Largest relative deviation between the cache and a fresh compute_g.
double shape_cache_error(const AttributePriorState& state, const AttributeMatrix& F);

}  // namespace narm
