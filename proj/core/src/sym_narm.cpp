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

#include "narm/sym_narm.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <limits>
#include <string>
#include <thread>

#include "narm/errors.hpp"
#include "internal.hpp"

namespace narm {
namespace {

// Gamma draws that keep the exact log next to the floored value.
double floored_exp(double log_value) {
  return std::max(std::exp(log_value), std::numeric_limits<double>::min());
}

void draw_loading(SymState& st, std::size_t i, std::size_t k, double shape, double rate,
                  RngStream& rng) {
  st.log_phi(i, k) = sample_log_gamma(shape, rate, rng);
  st.phi(i, k) = floored_exp(st.log_phi(i, k));
}

void draw_weight(SymState& st, std::size_t k, double shape, double rate, RngStream& rng) {
  st.log_r[k] = sample_log_gamma(shape, rate, rng);
  st.r[k] = floored_exp(st.log_r[k]);
}

void draw_block(SymState& st, std::size_t k1, std::size_t k2, double shape, double rate,
                RngStream& rng) {
  const double log_value = sample_log_gamma(shape, rate, rng);
  st.log_lambda(k1, k2) = log_value;
  st.log_lambda(k2, k1) = log_value;
  st.lambda(k1, k2) = floored_exp(log_value);
  st.lambda(k2, k1) = st.lambda(k1, k2);
}

using detail::check_finite_values;
using detail::log_gamma_density;
using detail::log_gamma_density_at_log;
using detail::mirror_upper;

struct CountPiece {
  LinkAllocations alloc;
  CountMatrix node_counts;
  CountMatrix block_counts;
  std::size_t floor_hits = 0;
};

// Allocates latent counts for links [begin, end) into `piece`.
void allocate_links(const SparseBinaryMatrix& links, std::size_t begin, std::size_t end,
                    const SymState& st, RngStream& rng, CountPiece& piece) {
  const std::size_t K = st.num_factors();
  const std::size_t cells = K * K;
  std::vector<double> weights(cells);
  std::vector<long long> draw(cells);
  const auto entries = links.entries();
  for (std::size_t e = begin; e < end; ++e) {
    const auto [i, j] = entries[e];
    const auto phi_i = st.phi.row(i);
    const auto phi_j = st.phi.row(j);
    double rate = 0.0;
    for (std::size_t k1 = 0; k1 < K; ++k1) {
      const auto lam = st.lambda.row(k1);
      for (std::size_t k2 = 0; k2 < K; ++k2) {
        const double w = phi_i[k1] * lam[k2] * phi_j[k2];
        weights[k1 * K + k2] = w;
        rate += w;
      }
    }
    if (!(rate >= kRateFloor)) {
      ++piece.floor_hits;
      if (!(rate > 0.0)) std::fill(weights.begin(), weights.end(), 1.0);
      rate = kRateFloor;
    }
    const long long total = sample_ztp(rate, rng);
    allocate_multinomial(total, weights, draw, rng);
    piece.alloc.totals.push_back(total);
    for (std::size_t cell = 0; cell < cells; ++cell) {
      const long long n = draw[cell];
      if (n == 0) continue;
      const std::size_t k1 = cell / K;
      const std::size_t k2 = cell % K;
      piece.alloc.cells.push_back(static_cast<std::uint32_t>(cell));
      piece.alloc.counts.push_back(n);
      piece.node_counts(i, k1) += n;
      piece.node_counts(j, k2) += n;
      piece.block_counts(std::min(k1, k2), std::max(k1, k2)) += n;
    }
    piece.alloc.offsets.push_back(piece.alloc.cells.size());
  }
}

void impute_held_out(SymState& st, RngStream& rng) {
  const std::size_t K = st.num_factors();
  std::vector<double> weights(K * K);
  std::vector<long long> draw(K * K);
  for (const auto [i, j] : st.held_out) {
    double rate = 0.0;
    for (std::size_t k1 = 0; k1 < K; ++k1) {
      for (std::size_t k2 = 0; k2 < K; ++k2) {
        weights[k1 * K + k2] = st.phi(i, k1) * st.lambda(k1, k2) * st.phi(j, k2);
        rate += weights[k1 * K + k2];
      }
    }
    const long long total = sample_poisson(rate, rng);
    if (total == 0) continue;
    allocate_multinomial(total, weights, draw, rng);
    for (std::size_t cell = 0; cell < K * K; ++cell) {
      const long long n = draw[cell];
      if (n == 0) continue;
      const std::size_t k1 = cell / K;
      const std::size_t k2 = cell % K;
      st.node_counts(i, k1) += n;
      st.node_counts(j, k2) += n;
      st.block_counts(std::min(k1, k2), std::max(k1, k2)) += n;
    }
  }
}

}  // namespace

std::vector<double> sym_factor_totals(const RealMatrix& phi) {
  std::vector<double> totals(phi.cols(), 0.0);
  for (std::size_t i = 0; i < phi.rows(); ++i) {
    const auto row = phi.row(i);
    for (std::size_t k = 0; k < phi.cols(); ++k) totals[k] += row[k];
  }
  return totals;
}

RealMatrix sym_pair_exposure(const RealMatrix& phi) {
  const std::size_t K = phi.cols();
  const auto totals = sym_factor_totals(phi);
  RealMatrix self(K, K, 0.0);
  for (std::size_t i = 0; i < phi.rows(); ++i) {
    const auto row = phi.row(i);
    for (std::size_t k1 = 0; k1 < K; ++k1) {
      for (std::size_t k2 = k1; k2 < K; ++k2) self(k1, k2) += row[k1] * row[k2];
    }
  }
  RealMatrix P(K, K, 0.0);
  for (std::size_t k1 = 0; k1 < K; ++k1) {
    P(k1, k1) = std::max(0.5 * (totals[k1] * totals[k1] - self(k1, k1)), 0.0);
    for (std::size_t k2 = k1 + 1; k2 < K; ++k2) {
      P(k1, k2) = std::max(totals[k1] * totals[k2] - self(k1, k2), 0.0);
      P(k2, k1) = P(k1, k2);
    }
  }
  return P;
}

void sym_sync_logs(SymState& state) {
  const auto take_logs = [](std::span<const double> src, std::span<double> dst) {
    for (std::size_t n = 0; n < src.size(); ++n) dst[n] = std::log(src[n]);
  };
  state.log_phi = RealMatrix(state.phi.rows(), state.phi.cols());
  state.log_lambda = RealMatrix(state.lambda.rows(), state.lambda.cols());
  state.log_r.resize(state.r.size());
  take_logs(state.phi.values(), state.log_phi.values());
  take_logs(state.lambda.values(), state.log_lambda.values());
  take_logs(state.r, state.log_r);
}

double sym_block_shape(const SymState& state, std::size_t k1, std::size_t k2) {
  if (k1 == k2) return state.hypers.epsilon * state.r[k1];
  return state.r[k1] * state.r[k2];
}

RealMatrix sym_node_exposure(const SymState& state) {
  const std::size_t N = state.num_nodes();
  const std::size_t K = state.num_factors();
  const auto totals = sym_factor_totals(state.phi);
  RealMatrix s(N, K, 0.0);
  std::vector<double> others(K);
  for (std::size_t i = 0; i < N; ++i) {
    const auto row = state.phi.row(i);
    for (std::size_t k = 0; k < K; ++k) others[k] = std::max(totals[k] - row[k], 0.0);
    for (std::size_t k = 0; k < K; ++k) {
      const auto lam = state.lambda.row(k);
      double acc = 0.0;
      for (std::size_t k2 = 0; k2 < K; ++k2) acc += lam[k2] * others[k2];
      s(i, k) = acc;
    }
  }
  return s;
}

RateSummary sym_rate_summary(const SymState& state) {
  RateSummary rates{sym_node_exposure(state)};
  for (std::size_t i = 0; i < state.num_nodes(); ++i) {
    for (auto& v : rates.nu.row(i)) v = std::log1p(v / state.c[i]);
  }
  return rates;
}

SymState sym_initialize(const SparseBinaryMatrix& links, const AttributeMatrix& F,
                        const AttributeMatrix* parents, std::size_t n_factors,
                        const SymHypers& hypers, const SamplerOptions& options,
                        std::uint64_t seed) {
  NARM_EXPECTS(n_factors >= 1, "at least one latent factor is required");
  NARM_EXPECTS(!links.directed(), "the symmetric model needs an undirected network");
  NARM_EXPECTS(F.n_nodes() == links.n_nodes(), "attribute matrix has the wrong node count");
  RngStream rng(seed, 1);
  const std::size_t N = links.n_nodes();
  const std::size_t K = n_factors;
  SymState st;
  st.seed = seed;
  st.hypers = hypers;
  st.c.resize(N);
  for (auto& ci : st.c) ci = sample_gamma(hypers.e0, hypers.f0, rng);
  st.r.resize(K);
  st.log_r.resize(K);
  for (std::size_t k = 0; k < K; ++k) {
    draw_weight(st, k, hypers.gamma0 / static_cast<double>(K), hypers.c0, rng);
  }
  st.lambda = RealMatrix(K, K);
  st.log_lambda = RealMatrix(K, K);
  for (std::size_t k1 = 0; k1 < K; ++k1) {
    for (std::size_t k2 = k1; k2 < K; ++k2) {
      draw_block(st, k1, k2, sym_block_shape(st, k1, k2), hypers.a0, rng);
    }
  }
  st.prior = init_attribute_prior(F, K, hypers.mu0, parents, rng);
  st.phi = RealMatrix(N, K);
  st.log_phi = RealMatrix(N, K);
  for (std::size_t i = 0; i < N; ++i) {
    for (std::size_t k = 0; k < K; ++k) draw_loading(st, i, k, st.prior.G(i, k), st.c[i], rng);
  }
  sym_sample_counts(links, st, rng, options);
  return st;
}

void sym_sample_counts(const SparseBinaryMatrix& links, SymState& st, RngStream& rng,
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
    p.block_counts = CountMatrix(K, K, 0);
  }
  if (workers == 1) {
    allocate_links(links, 0, E, st, rng, pieces[0]);
  } else {
    // Each chunk draws from its own stream, so results depend on the worker
    // count but not on scheduling.
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
  st.block_counts = std::move(pieces[0].block_counts);
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
      auto bdst = st.block_counts.values();
      auto bsrc = p.block_counts.values();
      for (std::size_t n = 0; n < bdst.size(); ++n) bdst[n] += bsrc[n];
    }
  }
  impute_held_out(st, rng);
  mirror_upper(st.block_counts);
  if (stats != nullptr) {
    stats->pairs_touched += E;
    stats->rate_floor_hits += floor_hits;
  }
}

void sym_sample_phi(SymState& st, RngStream& rng) {
  const std::size_t N = st.num_nodes();
  const std::size_t K = st.num_factors();
  auto totals = sym_factor_totals(st.phi);
  std::vector<double> others(K);
  std::vector<double> exposure(K);
  for (std::size_t i = 0; i < N; ++i) {
    auto row = st.phi.row(i);
    for (std::size_t k = 0; k < K; ++k) others[k] = std::max(totals[k] - row[k], 0.0);
    for (std::size_t k = 0; k < K; ++k) {
      const auto lam = st.lambda.row(k);
      double acc = 0.0;
      for (std::size_t k2 = 0; k2 < K; ++k2) acc += lam[k2] * others[k2];
      exposure[k] = acc;
    }
    for (std::size_t k = 0; k < K; ++k) {
      const double shape = st.prior.G(i, k) + static_cast<double>(st.node_counts(i, k));
      const double old = row[k];
      draw_loading(st, i, k, shape, st.c[i] + exposure[k], rng);
      totals[k] += row[k] - old;
    }
  }
}

void sym_sample_r(SymState& st, RngStream& rng, CrtVariant crt) {
  const std::size_t K = st.num_factors();
  const auto P = sym_pair_exposure(st.phi);
  const double a0 = st.hypers.a0;
  CountMatrix tables(K, K, 0);
  for (std::size_t k1 = 0; k1 < K; ++k1) {
    for (std::size_t k2 = k1; k2 < K; ++k2) {
      const long long x = st.block_counts(k1, k2);
      const long long t = x > 0 ? sample_crt(x, sym_block_shape(st, k1, k2), rng, crt) : 0;
      tables(k1, k2) = t;
      tables(k2, k1) = t;
    }
  }
  const double base_shape = st.hypers.gamma0 / static_cast<double>(K);
  for (std::size_t k = 0; k < K; ++k) {
    double shape = base_shape;
    double rate = st.hypers.c0 + st.hypers.epsilon * std::log1p(P(k, k) / a0);
    for (std::size_t k2 = 0; k2 < K; ++k2) {
      shape += static_cast<double>(tables(k, k2));
      if (k2 != k) rate += st.r[k2] * std::log1p(P(k, k2) / a0);
    }
    draw_weight(st, k, shape, rate, rng);
  }
}

void sym_sample_lambda(SymState& st, RngStream& rng) {
  const std::size_t K = st.num_factors();
  const auto P = sym_pair_exposure(st.phi);
  for (std::size_t k1 = 0; k1 < K; ++k1) {
    for (std::size_t k2 = k1; k2 < K; ++k2) {
      const double shape =
          sym_block_shape(st, k1, k2) + static_cast<double>(st.block_counts(k1, k2));
      draw_block(st, k1, k2, shape, st.hypers.a0 + P(k1, k2), rng);
    }
  }
}

void sym_sample_hypers(SymState& st, RngStream& rng, bool resample_extra, CrtVariant) {
  const std::size_t N = st.num_nodes();
  const std::size_t K = st.num_factors();
  const double e0 = st.hypers.e0;
  const double f0 = st.hypers.f0;
  for (std::size_t i = 0; i < N; ++i) {
    double shape = e0;
    double rate = f0;
    for (std::size_t k = 0; k < K; ++k) {
      shape += st.prior.G(i, k);
      rate += st.phi(i, k);
    }
    st.c[i] = sample_gamma(shape, rate, rng);
  }
  {
    double shape = e0;
    double rate = f0;
    for (std::size_t k1 = 0; k1 < K; ++k1) {
      for (std::size_t k2 = k1; k2 < K; ++k2) {
        shape += sym_block_shape(st, k1, k2);
        rate += st.lambda(k1, k2);
      }
    }
    st.hypers.a0 = sample_gamma(shape, rate, rng);
  }
  if (!resample_extra) return;

  double r_total = 0.0;
  for (double rk : st.r) r_total += rk;
  st.hypers.c0 = sample_gamma(e0 + st.hypers.gamma0, f0 + r_total, rng);

  const double Kd = static_cast<double>(K);
  st.hypers.gamma0 = log_space_mh_step(
      st.hypers.gamma0, 0.5,
      [&](double g0) {
        double lp = log_gamma_density(g0, e0, f0);
        for (double log_rk : st.log_r) lp += log_gamma_density_at_log(log_rk, g0 / Kd, st.hypers.c0);
        return lp;
      },
      rng);
  st.hypers.epsilon = log_space_mh_step(
      st.hypers.epsilon, 0.5,
      [&](double eps) {
        double lp = log_gamma_density(eps, e0, f0);
        for (std::size_t k = 0; k < K; ++k) {
          lp += log_gamma_density_at_log(st.log_lambda(k, k), eps * st.r[k], st.hypers.a0);
        }
        return lp;
      },
      rng);
}

void sym_sweep(SymState& st, const SparseBinaryMatrix& links, const AttributeMatrix& F,
               RngStream& rng, const SamplerOptions& options, SweepStats* stats) {
  PhaseClock clock(stats);
  sym_sample_counts(links, st, rng, options, stats);
  clock.mark(Phase::counts);

  sample_tables(st.node_counts, st.prior.G, st.prior.T, rng, options.crt);
  clock.mark(Phase::tables);

  const auto rates = sym_rate_summary(st);
  const LoadingLaw law{st.log_phi, st.c};
  const PriorSweepOptions prior_options{options.crt, options.shape_update};
  sample_hierarchy(st.prior, F, rates, rng, prior_options);
  for (std::size_t l = 0; l < st.prior.num_attributes(); ++l) {
    for (std::size_t k = 0; k < st.num_factors(); ++k) {
      sample_h(st.prior, F, st.node_counts, rates, l, k, rng, prior_options, &law);
    }
  }
  for (std::size_t k = 0; k < st.num_factors(); ++k) {
    sample_b(st.prior, F, st.node_counts, rates, k, rng, prior_options, &law);
  }
  clock.mark(Phase::attributes);

  sym_sample_phi(st, rng);
  clock.mark(Phase::loadings);
  // r is drawn with lambda integrated out, so lambda must follow it.
  sym_sample_r(st, rng, options.crt);
  clock.mark(Phase::weights);
  sym_sample_lambda(st, rng);
  clock.mark(Phase::blocks);
  sym_sample_hypers(st, rng, options.resample_hypers, options.crt);
  clock.mark(Phase::hypers);

  ++st.sweeps;
  if (options.refresh_every != 0 && st.sweeps % options.refresh_every == 0) {
    refresh_g(st.prior, F);
  }
  sym_check_finite(st);
}

double sym_pair_rate(const RealMatrix& phi, const RealMatrix& lambda, std::size_t i,
                     std::size_t j) {
  const std::size_t K = phi.cols();
  const auto pi = phi.row(i);
  const auto pj = phi.row(j);
  double rate = 0.0;
  for (std::size_t k1 = 0; k1 < K; ++k1) {
    const auto lam = lambda.row(k1);
    double inner = 0.0;
    for (std::size_t k2 = 0; k2 < K; ++k2) inner += lam[k2] * pj[k2];
    rate += pi[k1] * inner;
  }
  return rate;
}

double sym_link_probability(const RealMatrix& phi, const RealMatrix& lambda, std::size_t i,
                            std::size_t j) {
  NARM_EXPECTS(i != j, "link probability is undefined for a self pair");
  return link_probability_from_rate(sym_pair_rate(phi, lambda, i, j));
}

double sym_log_likelihood(const SymState& st, const SparseBinaryMatrix& links) {
  const auto P = sym_pair_exposure(st.phi);
  double total = 0.0;
  for (std::size_t k1 = 0; k1 < st.num_factors(); ++k1) {
    for (std::size_t k2 = k1; k2 < st.num_factors(); ++k2) total += st.lambda(k1, k2) * P(k1, k2);
  }
  double ll = -total;
  for (const auto& e : links.entries()) {
    const double rate = std::max(sym_pair_rate(st.phi, st.lambda, e.row, e.col), kRateFloor);
    ll += std::log(-std::expm1(-rate)) + rate;
  }
  for (const auto [i, j] : st.held_out) ll += sym_pair_rate(st.phi, st.lambda, i, j);
  return ll;
}

SparseBinaryMatrix sym_resample_data(SymState& st, RngStream& rng) {
  const std::size_t N = st.num_nodes();
  const std::size_t K = st.num_factors();
  // phi_i Lambda, so each pair rate costs O(K).
  RealMatrix left(N, K, 0.0);
  for (std::size_t i = 0; i < N; ++i) {
    for (std::size_t k1 = 0; k1 < K; ++k1) {
      const double p = st.phi(i, k1);
      for (std::size_t k2 = 0; k2 < K; ++k2) left(i, k2) += p * st.lambda(k1, k2);
    }
  }
  st.alloc.clear();
  st.node_counts = CountMatrix(N, K, 0);
  st.block_counts = CountMatrix(K, K, 0);
  std::vector<NodePair> pairs;
  std::vector<double> weights(K * K);
  std::vector<long long> draw(K * K);
  for (std::size_t i = 0; i < N; ++i) {
    for (std::size_t j = i + 1; j < N; ++j) {
      double rate = 0.0;
      for (std::size_t k = 0; k < K; ++k) rate += left(i, k) * st.phi(j, k);
      const long long total = sample_poisson(rate, rng);
      if (total == 0) continue;
      for (std::size_t k1 = 0; k1 < K; ++k1) {
        for (std::size_t k2 = 0; k2 < K; ++k2) {
          weights[k1 * K + k2] = st.phi(i, k1) * st.lambda(k1, k2) * st.phi(j, k2);
        }
      }
      allocate_multinomial(total, weights, draw, rng);
      pairs.push_back({static_cast<NodeId>(i), static_cast<NodeId>(j)});
      st.alloc.totals.push_back(total);
      for (std::size_t cell = 0; cell < K * K; ++cell) {
        if (draw[cell] == 0) continue;
        const std::size_t k1 = cell / K;
        const std::size_t k2 = cell % K;
        st.alloc.cells.push_back(static_cast<std::uint32_t>(cell));
        st.alloc.counts.push_back(draw[cell]);
        st.node_counts(i, k1) += draw[cell];
        st.node_counts(j, k2) += draw[cell];
        st.block_counts(std::min(k1, k2), std::max(k1, k2)) += draw[cell];
      }
      st.alloc.offsets.push_back(st.alloc.cells.size());
    }
  }
  mirror_upper(st.block_counts);
  return SparseBinaryMatrix(N, Directedness::undirected, std::move(pairs));
}

SymSimulation sym_simulate(std::size_t n_nodes, std::size_t n_factors, const SymHypers& hypers,
                           const AttributeMatrix& F, const AttributeMatrix* parents,
                           RngStream& rng, const SamplerOptions& options) {
  NARM_EXPECTS(n_factors >= 1, "at least one latent factor is required");
  NARM_EXPECTS(F.n_nodes() == n_nodes, "attribute matrix has the wrong node count");
  const std::size_t N = n_nodes;
  const std::size_t K = n_factors;
  SymState st;
  st.hypers = hypers;
  st.hypers.a0 = sample_gamma(hypers.e0, hypers.f0, rng);
  if (options.resample_hypers) {
    st.hypers.gamma0 = sample_gamma(hypers.e0, hypers.f0, rng);
    st.hypers.epsilon = sample_gamma(hypers.e0, hypers.f0, rng);
    st.hypers.c0 = sample_gamma(hypers.e0, hypers.f0, rng);
  }
  st.c.resize(N);
  for (auto& ci : st.c) ci = sample_gamma(hypers.e0, hypers.f0, rng);
  st.r.resize(K);
  st.log_r.resize(K);
  for (std::size_t k = 0; k < K; ++k) {
    draw_weight(st, k, st.hypers.gamma0 / static_cast<double>(K), st.hypers.c0, rng);
  }
  st.lambda = RealMatrix(K, K);
  st.log_lambda = RealMatrix(K, K);
  for (std::size_t k1 = 0; k1 < K; ++k1) {
    for (std::size_t k2 = k1; k2 < K; ++k2) {
      draw_block(st, k1, k2, sym_block_shape(st, k1, k2), st.hypers.a0, rng);
    }
  }
  st.prior = init_attribute_prior(F, K, hypers.mu0, parents, rng);
  st.phi = RealMatrix(N, K);
  st.log_phi = RealMatrix(N, K);
  for (std::size_t i = 0; i < N; ++i) {
    for (std::size_t k = 0; k < K; ++k) draw_loading(st, i, k, st.prior.G(i, k), st.c[i], rng);
  }
  auto network = sym_resample_data(st, rng);
  sample_tables(st.node_counts, st.prior.G, st.prior.T, rng, options.crt);
  if (st.prior.hierarchy) {
    auto& hs = *st.prior.hierarchy;
    for (std::size_t l = 0; l < F.n_attrs(); ++l) {
      for (std::size_t k = 0; k < K; ++k) {
        long long sum = 0;
        for (NodeId i : F.nodes_with(l)) sum += st.prior.T(i, k);
        hs.tables(l, k) = sum > 0 ? sample_crt(sum, hs.mu(l, k), rng, options.crt) : 0;
      }
    }
  }
  return {std::move(network), std::move(st)};
}

void sym_check_finite(const SymState& st) {
  check_finite_values(st.phi.values(), "phi", st.sweeps);
  check_finite_values(st.log_phi.values(), "log phi", st.sweeps);
  check_finite_values(st.log_lambda.values(), "log lambda", st.sweeps);
  check_finite_values(st.log_r, "log r", st.sweeps);
  check_finite_values(st.lambda.values(), "lambda", st.sweeps);
  check_finite_values(st.r, "r", st.sweeps);
  check_finite_values(st.c, "c", st.sweeps);
  check_finite_values(st.prior.G.values(), "g", st.sweeps);
  const double a0 = st.hypers.a0;
  check_finite_values(std::span<const double>(&a0, 1), "a0", st.sweeps);
}

}  // namespace narm
