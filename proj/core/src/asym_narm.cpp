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

#include "narm/asym_narm.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <thread>

#include "internal.hpp"
#include "narm/errors.hpp"

namespace narm {
namespace {

using detail::check_finite_values;
using detail::log_gamma_density;

struct CountPiece {
  LinkAllocations alloc;
  CountMatrix node_counts;
  CountMatrix dest_counts;
  std::size_t floor_hits = 0;
};

void allocate_links(const SparseBinaryMatrix& links, std::size_t begin, std::size_t end,
                    const AsymState& st, RngStream& rng, CountPiece& piece) {
  const std::size_t K = st.num_factors();
  std::vector<double> weights(K);
  std::vector<long long> draw(K);
  const auto entries = links.entries();
  for (std::size_t e = begin; e < end; ++e) {
    const auto [i, j] = entries[e];
    const auto phi_i = st.phi.row(i);
    const auto theta_j = st.theta.row(j);
    double rate = 0.0;
    for (std::size_t k = 0; k < K; ++k) {
      weights[k] = phi_i[k] * theta_j[k];
      rate += weights[k];
    }
    if (!(rate >= kRateFloor)) {
      ++piece.floor_hits;
      if (!(rate > 0.0)) std::fill(weights.begin(), weights.end(), 1.0);
      rate = kRateFloor;
    }
    const long long total = sample_ztp(rate, rng);
    allocate_multinomial(total, weights, draw, rng);
    piece.alloc.totals.push_back(total);
    for (std::size_t k = 0; k < K; ++k) {
      if (draw[k] == 0) continue;
      piece.alloc.cells.push_back(static_cast<std::uint32_t>(k));
      piece.alloc.counts.push_back(draw[k]);
      piece.node_counts(i, k) += draw[k];
      piece.dest_counts(j, k) += draw[k];
    }
    piece.alloc.offsets.push_back(piece.alloc.cells.size());
  }
}

void impute_self_counts(AsymState& st, RngStream& rng) {
  for (std::size_t i = 0; i < st.num_nodes(); ++i) {
    for (std::size_t k = 0; k < st.num_factors(); ++k) {
      const long long n = sample_poisson(st.phi(i, k) * st.theta(i, k), rng);
      st.self_counts(i, k) = n;
      st.node_counts(i, k) += n;
      st.dest_counts(i, k) += n;
    }
  }
}

void impute_held_out(AsymState& st, RngStream& rng) {
  const std::size_t K = st.num_factors();
  std::vector<double> weights(K);
  std::vector<long long> draw(K);
  for (const auto [i, j] : st.held_out) {
    double rate = 0.0;
    for (std::size_t k = 0; k < K; ++k) {
      weights[k] = st.phi(i, k) * st.theta(j, k);
      rate += weights[k];
    }
    const long long total = sample_poisson(rate, rng);
    if (total == 0) continue;
    allocate_multinomial(total, weights, draw, rng);
    for (std::size_t k = 0; k < K; ++k) {
      st.node_counts(i, k) += draw[k];
      st.dest_counts(j, k) += draw[k];
    }
  }
}

double logit_mh_step(double value, double step, auto&& log_target, RngStream& rng) {
  const double z = std::log(value) - std::log1p(-value);
  const double z_new = z + step * (2.0 * rng.uniform() - 1.0);
  const double proposal = 1.0 / (1.0 + std::exp(-z_new));
  if (!(proposal > 0.0 && proposal < 1.0)) return value;
  // Jacobian of the logit transform: x (1 - x).
  const double log_ratio = log_target(proposal) + std::log(proposal) + std::log1p(-proposal) -
                           log_target(value) - std::log(value) - std::log1p(-value);
  return std::log(rng.uniform()) < log_ratio ? proposal : value;
}

// Beta log-density from the exact logs of x and 1 - x.
double log_beta_density(double log_x, double log1m_x, double a, double b) {
  return std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) + (a - 1.0) * log_x +
         (b - 1.0) * log1m_x;
}

// q_k ~ Beta(a, b) as X / (X + Y) with X, Y unit-rate gammas, drawn in log
// space so that both log q and log(1 - q) stay exact.
void draw_coupler(AsymState& st, std::size_t k, double a, double b, RngStream& rng) {
  const double lx = sample_log_gamma(a, 1.0, rng);
  const double ly = sample_log_gamma(b, 1.0, rng);
  const double m = std::max(lx, ly);
  const double log_total = m + std::log(std::exp(lx - m) + std::exp(ly - m));
  st.log_q[k] = lx - log_total;
  st.log1m_q[k] = ly - log_total;
  st.q[k] = std::clamp(std::exp(st.log_q[k]), std::numeric_limits<double>::min(),
                       std::nextafter(1.0, 0.0));
}

double log_dirichlet_symmetric(const RealMatrix& theta, std::size_t k, double a0) {
  const double n = static_cast<double>(theta.rows());
  double lp = std::lgamma(n * a0) - n * std::lgamma(a0);
  for (std::size_t j = 0; j < theta.rows(); ++j) lp += (a0 - 1.0) * std::log(theta(j, k));
  return lp;
}

void draw_parameters(AsymState& st, const AttributeMatrix& F, const AttributeMatrix* parents,
                     RngStream& rng) {
  const std::size_t N = F.n_nodes();
  const std::size_t K = st.q.size();
  st.log_q.resize(K);
  st.log1m_q.resize(K);
  for (std::size_t k = 0; k < K; ++k) {
    draw_coupler(st, k, st.hypers.c0 * st.hypers.epsilon,
                 st.hypers.c0 * (1.0 - st.hypers.epsilon), rng);
  }
  st.prior = init_attribute_prior(F, K, st.hypers.mu0, parents, rng);
  st.phi = RealMatrix(N, K);
  for (std::size_t i = 0; i < N; ++i) {
    for (std::size_t k = 0; k < K; ++k) {
      st.phi(i, k) = sample_gamma(st.prior.G(i, k), (1.0 - st.q[k]) / st.q[k], rng);
    }
  }
  st.theta = RealMatrix(N, K);
  const std::vector<double> alphas(N, st.hypers.a0);
  std::vector<double> column(N);
  for (std::size_t k = 0; k < K; ++k) {
    sample_dirichlet(alphas, column, rng);
    for (std::size_t j = 0; j < N; ++j) st.theta(j, k) = column[j];
  }
}

}  // namespace

AsymState asym_initialize(const SparseBinaryMatrix& links, const AttributeMatrix& F,
                          const AttributeMatrix* parents, std::size_t n_factors,
                          const AsymHypers& hypers, const SamplerOptions& options,
                          std::uint64_t seed) {
  NARM_EXPECTS(n_factors >= 1, "at least one latent factor is required");
  NARM_EXPECTS(links.directed(), "the directed model needs a directed network");
  NARM_EXPECTS(F.n_nodes() == links.n_nodes(), "attribute matrix has the wrong node count");
  NARM_EXPECTS(hypers.epsilon > 0.0 && hypers.epsilon < 1.0, "epsilon must lie in (0, 1)");
  RngStream rng(seed, 1);
  AsymState st;
  st.seed = seed;
  st.hypers = hypers;
  st.q.resize(n_factors);
  draw_parameters(st, F, parents, rng);
  asym_sample_counts(links, st, rng, options);
  return st;
}

void asym_sync_logs(AsymState& st) {
  st.log_q.resize(st.q.size());
  st.log1m_q.resize(st.q.size());
  for (std::size_t k = 0; k < st.q.size(); ++k) {
    st.log_q[k] = std::log(st.q[k]);
    st.log1m_q[k] = std::log1p(-st.q[k]);
  }
}

void asym_sample_counts(const SparseBinaryMatrix& links, AsymState& st, RngStream& rng,
                        const SamplerOptions& options, SweepStats* stats) {
  const std::size_t N = st.num_nodes();
  const std::size_t K = st.num_factors();
  const std::size_t E = links.num_entries();

  std::size_t workers = 1;
  if (options.parallel) {
    workers = options.threads != 0 ? options.threads
                                    : std::max(1U, std::thread::hardware_concurrency());
    workers = std::clamp<std::size_t>(workers, 1, std::max<std::size_t>(E / 256, 1));
  }
  std::vector<CountPiece> pieces(workers);
  for (auto& p : pieces) {
    p.node_counts = CountMatrix(N, K, 0);
    p.dest_counts = CountMatrix(N, K, 0);
  }
  if (workers == 1) {
    allocate_links(links, 0, E, st, rng, pieces[0]);
  } else {
    std::vector<std::thread> threads;
    const std::size_t chunk = (E + workers - 1) / workers;
    for (std::size_t w = 0; w < workers; ++w) {
      threads.emplace_back([&, w] {
        RngStream local(st.seed, 1000 + st.sweeps * workers + w);
        const std::size_t begin = std::min(E, w * chunk);
        const std::size_t end = std::min(E, begin + chunk);
        allocate_links(links, begin, end, st, local, pieces[w]);
      });
    }
    for (auto& t : threads) t.join();
  }

  st.alloc.clear();
  st.node_counts = std::move(pieces[0].node_counts);
  st.dest_counts = std::move(pieces[0].dest_counts);
  std::size_t floor_hits = 0;
  for (std::size_t w = 0; w < workers; ++w) {
    auto& p = pieces[w];
    floor_hits += p.floor_hits;
    const std::size_t base = st.alloc.cells.size();
    st.alloc.totals.insert(st.alloc.totals.end(), p.alloc.totals.begin(), p.alloc.totals.end());
    st.alloc.cells.insert(st.alloc.cells.end(), p.alloc.cells.begin(), p.alloc.cells.end());
    st.alloc.counts.insert(st.alloc.counts.end(), p.alloc.counts.begin(), p.alloc.counts.end());
    for (std::size_t n = 1; n < p.alloc.offsets.size(); ++n) {
      st.alloc.offsets.push_back(base + p.alloc.offsets[n]);
    }
    if (w > 0) {
      auto dst = st.node_counts.values();
      auto src = p.node_counts.values();
      for (std::size_t n = 0; n < dst.size(); ++n) dst[n] += src[n];
      auto ddst = st.dest_counts.values();
      auto dsrc = p.dest_counts.values();
      for (std::size_t n = 0; n < ddst.size(); ++n) ddst[n] += dsrc[n];
    }
  }
  st.self_counts = CountMatrix(N, K, 0);
  impute_self_counts(st, rng);
  impute_held_out(st, rng);
  if (stats != nullptr) {
    stats->pairs_touched += E;
    stats->rate_floor_hits += floor_hits;
  }
}

void asym_sample_theta(AsymState& st, RngStream& rng) {
  const std::size_t N = st.num_nodes();
  std::vector<double> alphas(N);
  std::vector<double> column(N);
  for (std::size_t k = 0; k < st.num_factors(); ++k) {
    for (std::size_t j = 0; j < N; ++j) {
      alphas[j] = st.hypers.a0 + static_cast<double>(st.dest_counts(j, k));
    }
    sample_dirichlet(alphas, column, rng);
    for (std::size_t j = 0; j < N; ++j) st.theta(j, k) = column[j];
  }
}

void asym_sample_phi(AsymState& st, RngStream& rng) {
  for (std::size_t i = 0; i < st.num_nodes(); ++i) {
    for (std::size_t k = 0; k < st.num_factors(); ++k) {
      const double shape = st.prior.G(i, k) + static_cast<double>(st.node_counts(i, k));
      st.phi(i, k) = sample_gamma(shape, 1.0 / st.q[k], rng);
    }
  }
}

void asym_sample_q(AsymState& st, RngStream& rng) {
  const double c0 = st.hypers.c0;
  const double eps = st.hypers.epsilon;
  for (std::size_t k = 0; k < st.num_factors(); ++k) {
    double counts = 0.0;
    double shapes = 0.0;
    for (std::size_t i = 0; i < st.num_nodes(); ++i) {
      counts += static_cast<double>(st.node_counts(i, k));
      shapes += st.prior.G(i, k);
    }
    draw_coupler(st, k, c0 * eps + counts, c0 * (1.0 - eps) + shapes, rng);
  }
}

void asym_sample_hypers(AsymState& st, RngStream& rng) {
  const double e0 = st.hypers.e0;
  const double f0 = st.hypers.f0;
  const std::size_t K = st.num_factors();
  st.hypers.a0 = log_space_mh_step(
      st.hypers.a0, 0.5,
      [&](double a0) {
        double lp = log_gamma_density(a0, e0, f0);
        for (std::size_t k = 0; k < K; ++k) lp += log_dirichlet_symmetric(st.theta, k, a0);
        return lp;
      },
      rng);
  st.hypers.c0 = log_space_mh_step(
      st.hypers.c0, 0.5,
      [&](double c0) {
        double lp = log_gamma_density(c0, e0, f0);
        for (std::size_t k = 0; k < K; ++k) {
          lp += log_beta_density(st.log_q[k], st.log1m_q[k], c0 * st.hypers.epsilon,
                                 c0 * (1.0 - st.hypers.epsilon));
        }
        return lp;
      },
      rng);
  // Uniform prior on epsilon.
  st.hypers.epsilon = logit_mh_step(
      st.hypers.epsilon, 1.0,
      [&](double eps) {
        double lp = 0.0;
        for (std::size_t k = 0; k < K; ++k) {
          lp += log_beta_density(st.log_q[k], st.log1m_q[k], st.hypers.c0 * eps,
                                 st.hypers.c0 * (1.0 - eps));
        }
        return lp;
      },
      rng);
}

void asym_sweep(AsymState& st, const SparseBinaryMatrix& links, const AttributeMatrix& F,
                RngStream& rng, const SamplerOptions& options, SweepStats* stats) {
  PhaseClock clock(stats);
  asym_sample_counts(links, st, rng, options, stats);
  clock.mark(Phase::counts);

  sample_tables(st.node_counts, st.prior.G, st.prior.T, rng, options.crt);
  clock.mark(Phase::tables);

  // Node factor totals are independent negative binomials here, so the
  // table-augmented updates are exact without correction.
  const auto rates = RateSummary::from_scale_couplers(st.num_nodes(), st.q);
  const PriorSweepOptions prior_options{options.crt, ShapeUpdate::collapsed};
  sample_hierarchy(st.prior, F, rates, rng, prior_options);
  for (std::size_t l = 0; l < st.prior.num_attributes(); ++l) {
    for (std::size_t k = 0; k < st.num_factors(); ++k) {
      sample_h(st.prior, F, st.node_counts, rates, l, k, rng, prior_options);
    }
  }
  for (std::size_t k = 0; k < st.num_factors(); ++k) {
    sample_b(st.prior, F, st.node_counts, rates, k, rng, prior_options);
  }
  clock.mark(Phase::attributes);

  // q is drawn with phi integrated out, so phi must follow it.
  asym_sample_q(st, rng);
  clock.mark(Phase::weights);
  asym_sample_phi(st, rng);
  clock.mark(Phase::loadings);
  asym_sample_theta(st, rng);
  clock.mark(Phase::blocks);
  if (options.resample_hypers) asym_sample_hypers(st, rng);
  clock.mark(Phase::hypers);

  ++st.sweeps;
  if (options.refresh_every != 0 && st.sweeps % options.refresh_every == 0) {
    refresh_g(st.prior, F);
  }
  asym_check_finite(st);
}

double asym_pair_rate(const RealMatrix& phi, const RealMatrix& theta, std::size_t i,
                      std::size_t j) {
  const auto a = phi.row(i);
  const auto b = theta.row(j);
  double rate = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) rate += a[k] * b[k];
  return rate;
}

double asym_link_probability(const RealMatrix& phi, const RealMatrix& theta, std::size_t i,
                             std::size_t j) {
  NARM_EXPECTS(i != j, "link probability is undefined for a self pair");
  return link_probability_from_rate(asym_pair_rate(phi, theta, i, j));
}

double asym_log_likelihood(const AsymState& st, const SparseBinaryMatrix& links) {
  double total = 0.0;
  for (std::size_t k = 0; k < st.num_factors(); ++k) {
    double phi_sum = 0.0;
    double theta_sum = 0.0;
    double diagonal = 0.0;
    for (std::size_t i = 0; i < st.num_nodes(); ++i) {
      phi_sum += st.phi(i, k);
      theta_sum += st.theta(i, k);
      diagonal += st.phi(i, k) * st.theta(i, k);
    }
    total += phi_sum * theta_sum - diagonal;
  }
  double ll = -total;
  for (const auto& e : links.entries()) {
    const double rate = std::max(asym_pair_rate(st.phi, st.theta, e.row, e.col), kRateFloor);
    ll += std::log(-std::expm1(-rate)) + rate;
  }
  for (const auto [i, j] : st.held_out) ll += asym_pair_rate(st.phi, st.theta, i, j);
  return ll;
}

SparseBinaryMatrix asym_resample_data(AsymState& st, RngStream& rng) {
  const std::size_t N = st.num_nodes();
  const std::size_t K = st.num_factors();
  st.alloc.clear();
  st.node_counts = CountMatrix(N, K, 0);
  st.dest_counts = CountMatrix(N, K, 0);
  std::vector<NodePair> pairs;
  std::vector<double> weights(K);
  std::vector<long long> draw(K);
  for (std::size_t i = 0; i < N; ++i) {
    for (std::size_t j = 0; j < N; ++j) {
      if (i == j) continue;
      double rate = 0.0;
      for (std::size_t k = 0; k < K; ++k) {
        weights[k] = st.phi(i, k) * st.theta(j, k);
        rate += weights[k];
      }
      const long long total = sample_poisson(rate, rng);
      if (total == 0) continue;
      allocate_multinomial(total, weights, draw, rng);
      pairs.push_back({static_cast<NodeId>(i), static_cast<NodeId>(j)});
      st.alloc.totals.push_back(total);
      for (std::size_t k = 0; k < K; ++k) {
        if (draw[k] == 0) continue;
        st.alloc.cells.push_back(static_cast<std::uint32_t>(k));
        st.alloc.counts.push_back(draw[k]);
        st.node_counts(i, k) += draw[k];
        st.dest_counts(j, k) += draw[k];
      }
      st.alloc.offsets.push_back(st.alloc.cells.size());
    }
  }
  st.self_counts = CountMatrix(N, K, 0);
  impute_self_counts(st, rng);
  return SparseBinaryMatrix(N, Directedness::directed, std::move(pairs));
}

AsymSimulation asym_simulate(std::size_t n_nodes, std::size_t n_factors,
                             const AsymHypers& hypers, const AttributeMatrix& F,
                             const AttributeMatrix* parents, RngStream& rng,
                             const SamplerOptions& options) {
  NARM_EXPECTS(n_factors >= 1, "at least one latent factor is required");
  NARM_EXPECTS(F.n_nodes() == n_nodes, "attribute matrix has the wrong node count");
  AsymState st;
  st.hypers = hypers;
  if (options.resample_hypers) {
    st.hypers.a0 = sample_gamma(hypers.e0, hypers.f0, rng);
    st.hypers.c0 = sample_gamma(hypers.e0, hypers.f0, rng);
    st.hypers.epsilon = rng.uniform();
  }
  st.q.resize(n_factors);
  draw_parameters(st, F, parents, rng);
  auto network = asym_resample_data(st, rng);
  sample_tables(st.node_counts, st.prior.G, st.prior.T, rng, options.crt);
  if (st.prior.hierarchy) {
    auto& hs = *st.prior.hierarchy;
    for (std::size_t l = 0; l < F.n_attrs(); ++l) {
      for (std::size_t k = 0; k < n_factors; ++k) {
        long long sum = 0;
        for (NodeId i : F.nodes_with(l)) sum += st.prior.T(i, k);
        hs.tables(l, k) = sum > 0 ? sample_crt(sum, hs.mu(l, k), rng, options.crt) : 0;
      }
    }
  }
  return {std::move(network), std::move(st)};
}

void asym_check_finite(const AsymState& st) {
  check_finite_values(st.phi.values(), "phi", st.sweeps);
  check_finite_values(st.theta.values(), "theta", st.sweeps);
  check_finite_values(st.q, "q", st.sweeps);
  check_finite_values(st.log_q, "log q", st.sweeps);
  check_finite_values(st.log1m_q, "log(1 - q)", st.sweeps);
  check_finite_values(st.prior.G.values(), "g", st.sweeps);
  for (std::size_t k = 0; k < st.num_factors(); ++k) {
    double sum = 0.0;
    for (std::size_t j = 0; j < st.num_nodes(); ++j) sum += st.theta(j, k);
    if (std::abs(sum - 1.0) > 1e-10) {
      throw NumericalError("theta column " + std::to_string(k) + " does not sum to one");
    }
    if (!(st.q[k] > 0.0 && st.q[k] < 1.0)) {
      throw NumericalError("q left (0, 1) after sweep " + std::to_string(st.sweeps));
    }
  }
}

}  // namespace narm
