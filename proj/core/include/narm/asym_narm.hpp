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

// Directed model. Each ordered pair (i, j), i != j, carries latent counts
// x(i, j, k) ~ Poi(phi(i, k) theta(j, k)); the link i -> j is present iff
// their sum is positive. Every factor column of theta is a Dirichlet
// distribution over destination nodes, and phi(i, k) is gamma with
// attribute-driven shape g(i, k) and scale q_k / (1 - q_k).
//
// Self pairs are never observed, but their counts x(i, i, k) are kept as
// latent variables and imputed every sweep. With them the exposure of
// phi(i, k) is the full column sum of theta, which is exactly one, so the
// per-node factor totals are negative binomial with probability q_k.

#include <cstddef>
#include <vector>

#include "narm/attribute_prior.hpp"
#include "narm/data.hpp"
#include "narm/matrix.hpp"
#include "narm/model.hpp"
#include "narm/rng.hpp"

namespace narm {

struct AsymHypers {
  double a0 = 1.0;
  double c0 = 1.0;
  double epsilon = 0.5;
  double e0 = 1.0;
  double f0 = 1.0;
  double mu0 = 1.0;
};

struct AsymState {
  RealMatrix phi;    // N x K
  RealMatrix theta;  // N x K, columns sum to one
  std::vector<double> q;
  // log q_k and log(1 - q_k), kept exactly. q itself is clamped inside
  // (0, 1), which loses the tails that the c0 and epsilon updates score.
  std::vector<double> log_q;
  std::vector<double> log1m_q;
  AsymHypers hypers;
  AttributePriorState prior;

  LinkAllocations alloc;
  CountMatrix self_counts;  // N x K latent x(i, i, k)
  CountMatrix node_counts;  // N x K: sum_j x(i, j, k), self pair included
  CountMatrix dest_counts;  // N x K: sum_i x(i, j, k), self pair included
  // Pairs whose entry is unobserved (held out for testing). Like the self
  // pairs, their counts are imputed from the current parameters each sweep
  // instead of being conditioned on as zeros.
  std::vector<NodePair> held_out;

  std::uint64_t seed = 0;
  std::size_t sweeps = 0;

  std::size_t num_nodes() const { return phi.rows(); }
  std::size_t num_factors() const { return q.size(); }
};

AsymState asym_initialize(const SparseBinaryMatrix& links, const AttributeMatrix& F,
                          const AttributeMatrix* parents, std::size_t n_factors,
                          const AsymHypers& hypers, const SamplerOptions& options,
                          std::uint64_t seed);

/// Recomputes log_q and log1m_q from q; call after setting q directly.
void asym_sync_logs(AsymState& state);

/// Allocates the training links and imputes the self-pair and held-out counts.
void asym_sample_counts(const SparseBinaryMatrix& links, AsymState& state, RngStream& rng,
                        const SamplerOptions& options = {}, SweepStats* stats = nullptr);
/// theta(:, k) ~ Dir(a0 + dest_counts(:, k)).
void asym_sample_theta(AsymState& state, RngStream& rng);
/// phi(i, k) ~ Ga(g(i, k) + node_counts(i, k), rate 1 / q_k).
void asym_sample_phi(AsymState& state, RngStream& rng);
/// q_k ~ Beta(c0 eps + sum_i node_counts(i, k), c0 (1 - eps) + sum_i g(i, k)),
/// with phi integrated out.
void asym_sample_q(AsymState& state, RngStream& rng);
void asym_sample_hypers(AsymState& state, RngStream& rng);

/// counts -> tables -> hierarchy, H, b -> q -> Phi -> Theta [-> hypers].
void asym_sweep(AsymState& state, const SparseBinaryMatrix& links, const AttributeMatrix& F,
                RngStream& rng, const SamplerOptions& options = {},
                SweepStats* stats = nullptr);

double asym_pair_rate(const RealMatrix& phi, const RealMatrix& theta, std::size_t i,
                      std::size_t j);
/// P(i -> j) = 1 - exp(-sum_k phi(i, k) theta(j, k)); i != j.
double asym_link_probability(const RealMatrix& phi, const RealMatrix& theta, std::size_t i,
                             std::size_t j);

/// Bernoulli-Poisson log-likelihood over all ordered pairs i != j that are
/// not held out.
double asym_log_likelihood(const AsymState& state, const SparseBinaryMatrix& links);

struct AsymSimulation {
  SparseBinaryMatrix network;
  AsymState state;
};

AsymSimulation asym_simulate(std::size_t n_nodes, std::size_t n_factors,
                             const AsymHypers& hypers, const AttributeMatrix& F,
                             const AttributeMatrix* parents, RngStream& rng,
                             const SamplerOptions& options = {});

/// Draws a fresh directed network (and self-pair counts) from the current
/// parameters.
SparseBinaryMatrix asym_resample_data(AsymState& state, RngStream& rng);

/// Throws NumericalError on non-finite values or a broken column sum.
void asym_check_finite(const AsymState& state);

}  // namespace narm
