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

#include "narm/attribute_prior.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <optional>
#include <span>
#include <vector>

#include "narm/errors.hpp"

namespace narm {
namespace {

double floored(double g, std::size_t* floor_hits) {
  if (g < kShapeFloor) {
    if (floor_hits != nullptr) ++*floor_hits;
    return kShapeFloor;
  }
  return g;
}

// Below this a factor is too close to the floors to be divided out of a
// cached product reliably.
constexpr double kSafeDivisor = 1e-150;

// log Gamma(x; shape, rate), normalised.
double log_gamma_kernel(double x, double shape, double rate) {
  return shape * std::log(rate) - std::lgamma(shape) + (shape - 1.0) * std::log(x) - rate * x;
}

class AllNodes {
 public:
  explicit AllNodes(std::size_t n) : n_(n) {}
  struct iterator {
    NodeId i;
    NodeId operator*() const { return i; }
    iterator& operator++() {
      ++i;
      return *this;
    }
    bool operator!=(const iterator& o) const { return i != o.i; }
  };
  iterator begin() const { return {0}; }
  iterator end() const { return {static_cast<NodeId>(n_)}; }
  std::size_t size() const { return n_; }

 private:
  std::size_t n_;
};

// g(i, k) with the factor h(skip, k) divided out, or b(k) when skip is absent.
// Falls back to the explicit product when the cached value or the factor sits
// near the floor.
double shape_without(const AttributePriorState& st, const AttributeMatrix& F, NodeId i,
                     std::size_t k, std::optional<NodeId> skip) {
  const double factor = skip ? st.H(*skip, k) : st.b[k];
  const double g = st.G(i, k);
  if (factor >= kSafeDivisor && g >= kSafeDivisor) return g / factor;
  double product = skip ? st.b[k] : 1.0;
  for (NodeId l : F.attributes_of(i)) {
    if (!skip || l != *skip) product *= st.H(l, k);
  }
  return product;
}

// Draws a new value for a multiplicative shape factor (one h(l, k) or b(k))
// shared by `nodes`; others[n] is the rest of g for the n-th node. T is
// updated in place when a corrected proposal is accepted. The caller rebuilds G.
template <typename NodeRange>
double draw_shape_factor(AttributePriorState& st, const NodeRange& nodes,
                         std::span<const double> others, std::size_t k, double current,
                         GammaParams prior, const CountMatrix& counts,
                         const RateSummary& rates, RngStream& rng,
                         const PriorSweepOptions& options, const LoadingLaw* law) {
  long long table_sum = 0;
  double exposure = 0.0;
  std::size_t n = 0;
  for (NodeId i : nodes) {
    table_sum += st.T(i, k);
    exposure += rates.nu(i, k) * others[n++];
  }
  const double proposal_rate = prior.rate + exposure;
  const double shape = prior.shape + static_cast<double>(table_sum);
  const double proposal = sample_gamma(shape, proposal_rate, rng);

  if (options.update == ShapeUpdate::collapsed || nodes.size() == 0) return proposal;
  NARM_EXPECTS(law != nullptr, "corrected shape update needs the loading law");

  // Fresh tables under the proposed value, for the reverse proposal density.
  std::vector<long long> fresh;
  fresh.reserve(nodes.size());
  long long fresh_sum = 0;
  double log_target = log_gamma_kernel(proposal, prior.shape, prior.rate) -
                      log_gamma_kernel(current, prior.shape, prior.rate);
  n = 0;
  for (NodeId i : nodes) {
    const double g_old = std::max(others[n] * current, kShapeFloor);
    const double g_new = std::max(others[n] * proposal, kShapeFloor);
    ++n;
    const long long t = counts(i, k) > 0
                            ? sample_crt(counts(i, k), g_new, rng, options.crt)
                            : 0;
    fresh.push_back(t);
    fresh_sum += t;
    const double log_cphi = std::log(law->node_rate[i]) + law->log_loading(i, k);
    log_target += (g_new - g_old) * log_cphi - std::lgamma(g_new) + std::lgamma(g_old);
  }
  const double reverse_shape = prior.shape + static_cast<double>(fresh_sum);
  const double log_accept = log_target +
                            log_gamma_kernel(current, reverse_shape, proposal_rate) -
                            log_gamma_kernel(proposal, shape, proposal_rate);
  ++st.counters.mh_proposals;
  if (std::log(rng.uniform()) < log_accept) {
    ++st.counters.mh_accepts;
    n = 0;
    for (NodeId i : nodes) st.T(i, k) = fresh[n++];
    return proposal;
  }
  return current;
}

}  // namespace

RateSummary RateSummary::from_scale_couplers(std::size_t n_nodes, std::span<const double> q) {
  RateSummary rates{RealMatrix(n_nodes, q.size())};
  for (std::size_t k = 0; k < q.size(); ++k) {
    const double nu = -std::log1p(-q[k]);
    for (std::size_t i = 0; i < n_nodes; ++i) rates.nu(i, k) = nu;
  }
  return rates;
}

AttributePriorState init_attribute_prior(const AttributeMatrix& F, std::size_t n_factors,
                                         double mu0, const AttributeMatrix* parents,
                                         RngStream& rng) {
  NARM_EXPECTS(mu0 > 0.0, "mu0 must be > 0");
  const std::size_t L = F.n_attrs();
  AttributePriorState st;
  st.mu0 = mu0;
  st.b.resize(n_factors);
  for (auto& bk : st.b) bk = sample_gamma(mu0, mu0, rng);
  st.H = RealMatrix(L, n_factors, 1.0);
  if (parents != nullptr) {
    if (parents->n_nodes() != L) {
      throw DataError("hierarchy covers " + std::to_string(parents->n_nodes()) +
                      " attributes but the attribute matrix has " + std::to_string(L));
    }
    HierarchyState h;
    h.parents = *parents;
    h.delta = RealMatrix(parents->n_attrs(), n_factors);
    for (auto& d : h.delta.values()) d = sample_gamma(mu0, mu0, rng);
    h.mu = RealMatrix(L, n_factors, 1.0);
    for (std::size_t l = 0; l < L; ++l) {
      for (NodeId m : parents->attributes_of(l)) {
        for (std::size_t k = 0; k < n_factors; ++k) h.mu(l, k) *= h.delta(m, k);
      }
    }
    h.tables = CountMatrix(L, n_factors, 0);
    st.hierarchy = std::move(h);
  }
  for (std::size_t l = 0; l < L; ++l) {
    for (std::size_t k = 0; k < n_factors; ++k) {
      st.H(l, k) = sample_gamma(h_prior(st, l, k).shape, mu0, rng);
    }
  }
  st.G = compute_g(st.H, st.b, F, &st.counters.shape_floor_hits);
  st.T = CountMatrix(F.n_nodes(), n_factors, 0);
  return st;
}

RealMatrix compute_g(const RealMatrix& H, std::span<const double> b, const AttributeMatrix& F,
                     std::size_t* floor_hits) {
  const std::size_t K = b.size();
  NARM_EXPECTS(H.rows() == F.n_attrs() && (H.rows() == 0 || H.cols() == K),
               "compute_g: dimension mismatch");
  RealMatrix G(F.n_nodes(), K);
  for (std::size_t i = 0; i < F.n_nodes(); ++i) {
    auto row = G.row(i);
    std::copy(b.begin(), b.end(), row.begin());
    for (NodeId l : F.attributes_of(i)) {
      const auto h = H.row(l);
      for (std::size_t k = 0; k < K; ++k) row[k] *= h[k];
    }
    for (auto& g : row) g = floored(g, floor_hits);
  }
  return G;
}

void refresh_g(AttributePriorState& state, const AttributeMatrix& F) {
  state.G = compute_g(state.H, state.b, F, &state.counters.shape_floor_hits);
}

void sample_tables(const CountMatrix& node_counts, const RealMatrix& G, CountMatrix& T,
                   RngStream& rng, CrtVariant variant) {
  NARM_EXPECTS(node_counts.rows() == G.rows() && node_counts.cols() == G.cols(),
               "sample_tables: dimension mismatch");
  if (T.rows() != G.rows() || T.cols() != G.cols()) T = CountMatrix(G.rows(), G.cols(), 0);
  const auto counts = node_counts.values();
  const auto shapes = G.values();
  auto tables = T.values();
  for (std::size_t n = 0; n < counts.size(); ++n) {
    NARM_EXPECTS(counts[n] >= 0, "sample_tables: negative count");
    tables[n] = counts[n] == 0 ? 0 : sample_crt(counts[n], shapes[n], rng, variant);
  }
}

GammaParams h_prior(const AttributePriorState& state, std::size_t l, std::size_t k) {
  if (state.hierarchy) return {state.hierarchy->mu(l, k), state.mu0};
  return {state.mu0, state.mu0};
}

GammaParams h_conditional(const AttributePriorState& state, const AttributeMatrix& F,
                          const RateSummary& rates, std::size_t l, std::size_t k,
                          GammaParams prior) {
  GammaParams post = prior;
  for (NodeId i : F.nodes_with(l)) {
    post.shape += static_cast<double>(state.T(i, k));
    post.rate += rates.nu(i, k) * shape_without(state, F, i, k, static_cast<NodeId>(l));
  }
  return post;
}

GammaParams b_conditional(const AttributePriorState& state, const AttributeMatrix& F,
                          const RateSummary& rates, std::size_t k) {
  GammaParams post{state.mu0, state.mu0};
  for (std::size_t i = 0; i < state.num_nodes(); ++i) {
    post.shape += static_cast<double>(state.T(i, k));
    post.rate += rates.nu(i, k) * shape_without(state, F, static_cast<NodeId>(i), k, {});
  }
  return post;
}

void update_g_after_h(std::size_t l, std::size_t k, double old_h, double new_h,
                      const AttributeMatrix& F, RealMatrix& G, std::size_t* floor_hits) {
  if (new_h == old_h) return;
  const double ratio = new_h / old_h;
  for (NodeId i : F.nodes_with(l)) G(i, k) = floored(G(i, k) * ratio, floor_hits);
}

double sample_h(AttributePriorState& state, const AttributeMatrix& F,
                const CountMatrix& node_counts, const RateSummary& rates, std::size_t l,
                std::size_t k, RngStream& rng, const PriorSweepOptions& options,
                const LoadingLaw* law) {
  const double old_h = state.H(l, k);
  const auto nodes = F.nodes_with(l);
  state.counters.h_node_touches += nodes.size();
  std::vector<double> others;
  others.reserve(nodes.size());
  for (NodeId i : nodes) others.push_back(shape_without(state, F, i, k, static_cast<NodeId>(l)));
  const double new_h = draw_shape_factor(state, nodes, others, k, old_h, h_prior(state, l, k),
                                         node_counts, rates, rng, options, law);
  if (new_h != old_h) {
    state.H(l, k) = new_h;
    std::size_t n = 0;
    for (NodeId i : nodes) {
      state.G(i, k) = floored(others[n++] * new_h, &state.counters.shape_floor_hits);
    }
  }
  return new_h;
}

double sample_b(AttributePriorState& state, const AttributeMatrix& F,
                const CountMatrix& node_counts, const RateSummary& rates, std::size_t k,
                RngStream& rng, const PriorSweepOptions& options, const LoadingLaw* law) {
  const double old_b = state.b[k];
  const std::size_t N = state.num_nodes();
  const AllNodes nodes(N);
  state.counters.b_node_touches += N;
  std::vector<double> others(N);
  for (std::size_t i = 0; i < N; ++i) {
    others[i] = shape_without(state, F, static_cast<NodeId>(i), k, {});
  }
  const double new_b = draw_shape_factor(state, nodes, others, k, old_b,
                                         {state.mu0, state.mu0}, node_counts, rates, rng,
                                         options, law);
  if (new_b != old_b) {
    state.b[k] = new_b;
    for (std::size_t i = 0; i < N; ++i) {
      state.G(i, k) = floored(others[i] * new_b, &state.counters.shape_floor_hits);
    }
  }
  return new_b;
}

void sample_hierarchy(AttributePriorState& state, const AttributeMatrix& F,
                      const RateSummary& rates, RngStream& rng,
                      const PriorSweepOptions& options) {
  if (!state.hierarchy) return;
  auto& hs = *state.hierarchy;
  const std::size_t L = state.num_attributes();
  const std::size_t K = state.num_factors();
  const std::size_t M = hs.parents.n_attrs();
  const double mu0 = state.mu0;

  // Per-attribute table totals and collapsed exposures of h(l, k).
  CountMatrix table_sum(L, K, 0);
  RealMatrix exposure(L, K, 0.0);
  for (std::size_t l = 0; l < L; ++l) {
    for (NodeId i : F.nodes_with(l)) {
      for (std::size_t k = 0; k < K; ++k) {
        table_sum(l, k) += state.T(i, k);
        exposure(l, k) += rates.nu(i, k) * shape_without(state, F, i, k, static_cast<NodeId>(l));
      }
    }
  }
  for (std::size_t l = 0; l < L; ++l) {
    for (std::size_t k = 0; k < K; ++k) {
      hs.tables(l, k) = table_sum(l, k) > 0
                            ? sample_crt(table_sum(l, k), hs.mu(l, k), rng, options.crt)
                            : 0;
    }
  }

  // mu(l, k) with delta(m, k) divided out.
  const auto mu_without = [&](std::size_t l, std::size_t k, std::size_t m) {
    const double factor = hs.delta(m, k);
    if (factor >= kSafeDivisor && hs.mu(l, k) >= kSafeDivisor) return hs.mu(l, k) / factor;
    double product = 1.0;
    for (NodeId p : hs.parents.attributes_of(l)) {
      if (p != m) product *= hs.delta(p, k);
    }
    return product;
  };

  std::vector<long long> fresh;
  std::vector<double> others;
  for (std::size_t m = 0; m < M; ++m) {
    const auto children = hs.parents.nodes_with(m);
    for (std::size_t k = 0; k < K; ++k) {
      const double current = hs.delta(m, k);
      double shape = mu0;
      double rate = mu0;
      others.clear();
      for (NodeId l : children) {
        others.push_back(mu_without(l, k, m));
        shape += static_cast<double>(hs.tables(l, k));
        rate += std::log1p(exposure(l, k) / mu0) * others.back();
      }
      const double proposal = sample_gamma(shape, rate, rng);
      bool accept = true;
      if (options.update == ShapeUpdate::corrected && !children.empty()) {
        // Exact target: delta's prior times the gamma densities of its
        // children's h values, whose shapes scale with delta.
        fresh.clear();
        long long fresh_sum = 0;
        double log_target = log_gamma_kernel(proposal, mu0, mu0) -
                            log_gamma_kernel(current, mu0, mu0);
        std::size_t n = 0;
        for (NodeId l : children) {
          const double a_old = std::max(others[n] * current, kShapeFloor);
          const double a_new = std::max(others[n] * proposal, kShapeFloor);
          ++n;
          const long long t =
              table_sum(l, k) > 0 ? sample_crt(table_sum(l, k), a_new, rng, options.crt) : 0;
          fresh.push_back(t);
          fresh_sum += t;
          log_target += (a_new - a_old) * (std::log(mu0) + std::log(state.H(l, k))) -
                        std::lgamma(a_new) + std::lgamma(a_old);
        }
        const double log_accept =
            log_target +
            log_gamma_kernel(current, mu0 + static_cast<double>(fresh_sum), rate) -
            log_gamma_kernel(proposal, shape, rate);
        ++state.counters.delta_proposals;
        accept = std::log(rng.uniform()) < log_accept;
        if (accept) {
          ++state.counters.delta_accepts;
          std::size_t n = 0;
          for (NodeId l : children) hs.tables(l, k) = fresh[n++];
        }
      }
      if (accept) {
        hs.delta(m, k) = proposal;
        std::size_t n = 0;
        for (NodeId l : children) hs.mu(l, k) = std::max(others[n++] * proposal, kShapeFloor);
      }
    }
  }
  // Recompute mu exactly so the incremental products cannot drift.
  for (std::size_t l = 0; l < L; ++l) {
    for (std::size_t k = 0; k < K; ++k) {
      double mu = 1.0;
      for (NodeId m : hs.parents.attributes_of(l)) mu *= hs.delta(m, k);
      hs.mu(l, k) = std::max(mu, kShapeFloor);
    }
  }
}

void sweep_attribute_prior(AttributePriorState& state, const AttributeMatrix& F,
                           const CountMatrix& node_counts, const RateSummary& rates,
                           RngStream& rng, const PriorSweepOptions& options,
                           const LoadingLaw* law) {
  sample_tables(node_counts, state.G, state.T, rng, options.crt);
  sample_hierarchy(state, F, rates, rng, options);
  for (std::size_t l = 0; l < state.num_attributes(); ++l) {
    for (std::size_t k = 0; k < state.num_factors(); ++k) {
      sample_h(state, F, node_counts, rates, l, k, rng, options, law);
    }
  }
  for (std::size_t k = 0; k < state.num_factors(); ++k) {
    sample_b(state, F, node_counts, rates, k, rng, options, law);
  }
}

double shape_cache_error(const AttributePriorState& state, const AttributeMatrix& F) {
  const auto fresh = compute_g(state.H, state.b, F);
  double worst = 0.0;
  const auto a = state.G.values();
  const auto b = fresh.values();
  for (std::size_t n = 0; n < a.size(); ++n) {
    worst = std::max(worst, std::abs(a[n] - b[n]) / b[n]);
  }
  return worst;
}

}  // namespace narm
