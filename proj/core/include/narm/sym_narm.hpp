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

// Symmetric model for undirected networks. Each unordered pair i < j carries
// latent Poisson counts x(i, k1, k2, j) ~ Poi(phi(i, k1) lambda(k1, k2)
// phi(j, k2)); the link is present iff their sum is positive. Loadings are
// gamma with attribute-driven shapes g(i, k) and per-node rates c_i; the
// symmetric block matrix comes from a truncated relational gamma process with
// factor weights r.

#include <cstddef>
#include <vector>

#include "narm/attribute_prior.hpp"
#include "narm/data.hpp"
#include "narm/matrix.hpp"
#include "narm/model.hpp"
#include "narm/rng.hpp"

namespace narm {

struct SymHypers {
  double gamma0 = 1.0;
  double epsilon = 1.0;
  double c0 = 1.0;
  double a0 = 1.0;  // initial value; resampled every sweep
  double e0 = 1.0;  // gamma hyper-prior shape
  double f0 = 1.0;  // gamma hyper-prior rate
  double mu0 = 1.0;
};

struct SymState {
  RealMatrix phi;     // N x K
  RealMatrix lambda;  // K x K, symmetric
  std::vector<double> r;
  // Exact logs of the three gamma blocks above. Draws with tiny shapes fall
  // below the smallest double and get floored; the shape and hyper-parameter
  // updates read these instead.
  RealMatrix log_phi;
  RealMatrix log_lambda;
  std::vector<double> log_r;
  std::vector<double> c;  // N
  SymHypers hypers;
  AttributePriorState prior;

  LinkAllocations alloc;
  CountMatrix node_counts;   // N x K: counts touching node i in factor k
  CountMatrix block_counts;  // K x K: (k1,k2) and (k2,k1) cells merged, mirrored
  // Unordered pairs whose entry is unobserved. Their latent counts are drawn
  // from the current parameters every sweep and added to the totals above,
  // which leaves the full-matrix exposures valid.
  std::vector<NodePair> held_out;

  std::uint64_t seed = 0;
  std::size_t sweeps = 0;

  std::size_t num_nodes() const { return phi.rows(); }
  std::size_t num_factors() const { return r.size(); }
};

/// Recomputes log_phi, log_lambda and log_r; call after setting the values
/// directly.
void sym_sync_logs(SymState& state);

/// Column sums A_k of phi.
std::vector<double> sym_factor_totals(const RealMatrix& phi);

/// Exposure of lambda summed over unordered node pairs:
///   P(k, k)   = (A_k^2 - sum_i phi(i,k)^2) / 2
///   P(k1, k2) = A_k1 A_k2 - sum_i phi(i,k1) phi(i,k2)
RealMatrix sym_pair_exposure(const RealMatrix& phi);

/// Prior shape of lambda(k1, k2): epsilon r_k on the diagonal, r_k1 r_k2 off it.
double sym_block_shape(const SymState& state, std::size_t k1, std::size_t k2);

/// Poisson exposure of phi(i, k) from every other node:
///   s(i, k) = sum_k2 lambda(k, k2) (A_k2 - phi(i, k2)).
RealMatrix sym_node_exposure(const SymState& state);

/// nu(i, k) = log(1 + s(i, k) / c_i).
RateSummary sym_rate_summary(const SymState& state);

/// Draws from the prior and allocates counts for the training links once.
SymState sym_initialize(const SparseBinaryMatrix& links, const AttributeMatrix& F,
                        const AttributeMatrix* parents, std::size_t n_factors,
                        const SymHypers& hypers, const SamplerOptions& options,
                        std::uint64_t seed);

void sym_sample_counts(const SparseBinaryMatrix& links, SymState& state, RngStream& rng,
                       const SamplerOptions& options = {}, SweepStats* stats = nullptr);
void sym_sample_phi(SymState& state, RngStream& rng);
void sym_sample_r(SymState& state, RngStream& rng, CrtVariant crt = CrtVariant::standard);
void sym_sample_lambda(SymState& state, RngStream& rng);
void sym_sample_hypers(SymState& state, RngStream& rng, bool resample_extra = false,
                       CrtVariant crt = CrtVariant::standard);

/// counts -> tables -> hierarchy, H, b -> Phi -> r -> Lambda -> hypers.
void sym_sweep(SymState& state, const SparseBinaryMatrix& links, const AttributeMatrix& F,
               RngStream& rng, const SamplerOptions& options = {},
               SweepStats* stats = nullptr);

double sym_pair_rate(const RealMatrix& phi, const RealMatrix& lambda, std::size_t i,
                     std::size_t j);
/// P(y = 1) = 1 - exp(-sum_{k1,k2} phi(i,k1) lambda(k1,k2) phi(j,k2)); i != j.
double sym_link_probability(const RealMatrix& phi, const RealMatrix& lambda, std::size_t i,
                            std::size_t j);

/// Bernoulli-Poisson log-likelihood of the training matrix (links and zeros),
/// held-out pairs excluded.
double sym_log_likelihood(const SymState& state, const SparseBinaryMatrix& links);

struct SymSimulation {
  SparseBinaryMatrix network;
  SymState state;
};

/// Forward-samples every variable top-down (hyper-parameters that the sampler
/// resamples are drawn from their gamma hyper-priors) and thresholds the
/// latent counts into a network.
SymSimulation sym_simulate(std::size_t n_nodes, std::size_t n_factors,
                           const SymHypers& hypers, const AttributeMatrix& F,
                           const AttributeMatrix* parents, RngStream& rng,
                           const SamplerOptions& options = {});

/// Draws a fresh network from the current parameters and the matching count
/// allocations (used by joint-distribution tests).
SparseBinaryMatrix sym_resample_data(SymState& state, RngStream& rng);

/// Throws NumericalError if any state scalar is non-finite.
void sym_check_finite(const SymState& state);

}  // namespace narm
