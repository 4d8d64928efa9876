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

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "narm/errors.hpp"
#include "narm/sym_narm.hpp"
#include "narm/synthetic.hpp"
#include "stats.hpp"

namespace narm {
namespace {

using testing::batch_means_se;
using testing::mean;

SparseBinaryMatrix single_link() {
  return SparseBinaryMatrix(2, Directedness::undirected, {{0, 1}});
}

void set_unit_parameters(SymState& st) {
  for (auto& v : st.phi.values()) v = 1.0;
  for (auto& v : st.lambda.values()) v = 1.0;
  sym_sync_logs(st);
}

double sum_of(const RealMatrix& m) {
  return std::accumulate(m.values().begin(), m.values().end(), 0.0);
}

TEST(SymCounts, UnitRateGivesZeroTruncatedPoissonTotals) {
  const auto links = single_link();
  const AttributeMatrix F(2, 0);
  auto st = sym_initialize(links, F, nullptr, 1, SymHypers{}, SamplerOptions{}, 1);
  set_unit_parameters(st);
  RngStream rng(2, 0);
  std::vector<double> totals;
  for (int n = 0; n < 100000; ++n) {
    sym_sample_counts(links, st, rng);
    ASSERT_GE(st.alloc.totals[0], 1);
    totals.push_back(static_cast<double>(st.alloc.totals[0]));
  }
  const double ztp_mean = 1.0 / (1.0 - std::exp(-1.0));
  EXPECT_NEAR(ztp_mean, 1.5820, 1e-4);
  // Var of ZTP(1): m (1 + 1 - m) with m the mean.
  const double ztp_sd = std::sqrt(ztp_mean * (2.0 - ztp_mean));
  const auto check = testing::mean_check("ztp", totals, ztp_mean, ztp_sd);
  EXPECT_TRUE(check.pass) << check.detail;
}

TEST(SymCounts, EmptyNetworkAllocatesNothing) {
  const SparseBinaryMatrix links(4, Directedness::undirected, {});
  auto st = sym_initialize(links, AttributeMatrix(4, 0), nullptr, 3, SymHypers{},
                           SamplerOptions{}, 3);
  RngStream rng(3, 0);
  SweepStats stats;
  sym_sample_counts(links, st, rng, SamplerOptions{}, &stats);
  EXPECT_EQ(st.alloc.num_links(), 0U);
  EXPECT_EQ(st.alloc.stored_cells(), 0U);
  EXPECT_EQ(stats.pairs_touched, 0U);
  for (auto v : st.node_counts.values()) EXPECT_EQ(v, 0);
}

TEST(SymCounts, CellsAddUpToTheLinkTotals) {
  PlantedConfig config;
  config.n_nodes = 40;
  config.seed = 4;
  const auto data = planted_partition(config);
  auto st = sym_initialize(data.network, data.attributes, nullptr, 5, SymHypers{},
                           SamplerOptions{}, 4);
  RngStream rng(4, 0);
  sym_sample_counts(data.network, st, rng);
  long long all = 0;
  for (std::size_t e = 0; e < st.alloc.num_links(); ++e) {
    const auto counts = st.alloc.counts_of(e);
    EXPECT_EQ(std::accumulate(counts.begin(), counts.end(), 0LL), st.alloc.totals[e]);
    all += st.alloc.totals[e];
  }
  long long node_sum = 0;
  for (auto v : st.node_counts.values()) node_sum += v;
  EXPECT_EQ(node_sum, 2 * all);
  long long block_sum = 0;
  for (std::size_t k1 = 0; k1 < 5; ++k1) {
    for (std::size_t k2 = k1; k2 < 5; ++k2) block_sum += st.block_counts(k1, k2);
  }
  EXPECT_EQ(block_sum, all);
}

TEST(SymCounts, HeldOutPairsDrawPoissonCounts) {
  const SparseBinaryMatrix links(3, Directedness::undirected, {});
  auto st = sym_initialize(links, AttributeMatrix(3, 0), nullptr, 1, SymHypers{},
                           SamplerOptions{}, 5);
  set_unit_parameters(st);
  st.held_out = {{0, 1}};
  RngStream rng(5, 0);
  std::vector<double> draws;
  for (int n = 0; n < 50000; ++n) {
    SweepStats stats;
    sym_sample_counts(links, st, rng, SamplerOptions{}, &stats);
    ASSERT_EQ(stats.pairs_touched, 0U);
    ASSERT_EQ(st.node_counts(0, 0), st.node_counts(1, 0));
    ASSERT_EQ(st.block_counts(0, 0), st.node_counts(0, 0));
    ASSERT_EQ(st.node_counts(2, 0), 0);
    draws.push_back(static_cast<double>(st.block_counts(0, 0)));
  }
  const auto check = testing::mean_check("held-out count", draws, 1.0, 1.0);
  EXPECT_TRUE(check.pass) << check.detail;
}

TEST(SymLikelihood, HeldOutPairsAreLeftOut) {
  const SparseBinaryMatrix links(2, Directedness::undirected, {});
  auto st = sym_initialize(links, AttributeMatrix(2, 0), nullptr, 1, SymHypers{},
                           SamplerOptions{}, 6);
  set_unit_parameters(st);
  EXPECT_DOUBLE_EQ(sym_log_likelihood(st, links), -1.0);
  st.held_out = {{1, 0}};
  EXPECT_DOUBLE_EQ(sym_log_likelihood(st, links), 0.0);
}

TEST(SymExposure, TwoNodeClosedForms) {
  const auto links = single_link();
  auto st = sym_initialize(links, AttributeMatrix(2, 0), nullptr, 1, SymHypers{},
                           SamplerOptions{}, 5);
  st.phi(0, 0) = 0.3;
  st.phi(1, 0) = 1.7;
  st.lambda(0, 0) = 2.5;
  sym_sync_logs(st);
  const auto s = sym_node_exposure(st);
  EXPECT_DOUBLE_EQ(s(0, 0), 2.5 * 1.7);
  EXPECT_DOUBLE_EQ(s(1, 0), 2.5 * 0.3);
  EXPECT_NEAR(sym_pair_exposure(st.phi)(0, 0), 0.3 * 1.7, 1e-15);
}

TEST(SymExposure, OffDiagonalPairsCountedOnce) {
  RealMatrix phi(3, 2);
  phi(0, 0) = 1.0;
  phi(1, 0) = 2.0;
  phi(2, 0) = 0.5;
  phi(0, 1) = 0.1;
  phi(1, 1) = 3.0;
  phi(2, 1) = 1.5;
  const auto P = sym_pair_exposure(phi);
  double diag = 0.0;
  double off = 0.0;
  for (std::size_t i = 0; i < 3; ++i) {
    for (std::size_t j = 0; j < 3; ++j) {
      if (i == j) continue;
      off += phi(i, 0) * phi(j, 1);
      if (i < j) diag += phi(i, 0) * phi(j, 0);
    }
  }
  EXPECT_NEAR(P(0, 0), diag, 1e-12);
  EXPECT_NEAR(P(0, 1), off, 1e-12);
}

// A single node has no pairs, so every block falls back to its prior.
class SymSingleNode : public ::testing::Test {
 protected:
  SymSingleNode()
      : links_(1, Directedness::undirected, {}),
        F_(1, 0),
        st_(sym_initialize(links_, F_, nullptr, 2, SymHypers{}, SamplerOptions{}, 6)) {}

  SparseBinaryMatrix links_;
  AttributeMatrix F_;
  SymState st_;
  RngStream rng_{6, 0};
};

TEST_F(SymSingleNode, LoadingsFollowTheirPrior) {
  st_.c[0] = 2.0;
  std::vector<double> draws;
  for (int n = 0; n < 50000; ++n) {
    sym_sample_phi(st_, rng_);
    draws.push_back(st_.phi(0, 1) / st_.prior.G(0, 1));
  }
  const double g = st_.prior.G(0, 1);
  const auto check = testing::mean_check("phi", draws, 0.5, std::sqrt(g) / 2.0 / g);
  EXPECT_TRUE(check.pass) << check.detail;
}

TEST_F(SymSingleNode, BlocksFollowTheirPrior) {
  st_.r = {0.7, 1.3};
  st_.hypers.a0 = 2.0;
  sym_sync_logs(st_);
  std::vector<double> diag;
  std::vector<double> off;
  for (int n = 0; n < 50000; ++n) {
    sym_sample_lambda(st_, rng_);
    diag.push_back(st_.lambda(1, 1));
    off.push_back(st_.lambda(0, 1));
    ASSERT_EQ(st_.lambda(0, 1), st_.lambda(1, 0));
  }
  auto check = testing::mean_check("diag", diag, 1.3 / 2.0, std::sqrt(1.3) / 2.0);
  EXPECT_TRUE(check.pass) << check.detail;
  check = testing::mean_check("off", off, 0.91 / 2.0, std::sqrt(0.91) / 2.0);
  EXPECT_TRUE(check.pass) << check.detail;
}

TEST_F(SymSingleNode, WeightsFollowTheirPrior) {
  st_.hypers.c0 = 4.0;
  std::vector<double> draws;
  for (int n = 0; n < 50000; ++n) {
    sym_sample_r(st_, rng_);
    draws.push_back(st_.r[0]);
  }
  // gamma0 / K = 0.5.
  const auto check = testing::mean_check("r", draws, 0.5 / 4.0, std::sqrt(0.5) / 4.0);
  EXPECT_TRUE(check.pass) << check.detail;
}

TEST_F(SymSingleNode, SweepsKeepThePriorMarginals) {
  std::vector<double> c;
  std::vector<double> a0;
  std::vector<double> b;
  for (int n = 0; n < 40000; ++n) {
    sym_sweep(st_, links_, F_, rng_);
    c.push_back(st_.c[0]);
    a0.push_back(st_.hypers.a0);
    b.push_back(st_.prior.b[0]);
  }
  for (const auto* series : {&c, &a0, &b}) {
    EXPECT_LT(std::abs(mean(*series) - 1.0), 4.0 * batch_means_se(*series, 50))
        << "mean " << mean(*series);
  }
}

TEST(SymLinkProbability, ClosedForms) {
  RealMatrix phi(2, 1, 1.0);
  RealMatrix lambda(1, 1, 1.0);
  EXPECT_NEAR(sym_link_probability(phi, lambda, 0, 1), 1.0 - std::exp(-1.0), 1e-15);
  EXPECT_NEAR(sym_link_probability(phi, lambda, 0, 1), 0.6321, 1e-4);
  lambda(0, 0) = std::log(2.0);
  EXPECT_NEAR(sym_link_probability(phi, lambda, 1, 0), 0.5, 1e-15);
  lambda(0, 0) = 0.0;
  EXPECT_EQ(sym_link_probability(phi, lambda, 0, 1), 0.0);
  EXPECT_THROW(sym_link_probability(phi, lambda, 1, 1), ContractViolation);
}

TEST(SymSweep, TouchesOnlyTheLinks) {
  PlantedConfig config;
  config.n_nodes = 60;
  config.seed = 7;
  const auto data = planted_partition(config);
  auto st = sym_initialize(data.network, data.attributes, nullptr, 6, SymHypers{},
                           SamplerOptions{}, 7);
  RngStream rng(7, 0);
  for (int n = 0; n < 5; ++n) {
    SweepStats stats;
    sym_sweep(st, data.network, data.attributes, rng, SamplerOptions{}, &stats);
    EXPECT_EQ(stats.pairs_touched, data.network.num_entries());
    EXPECT_EQ(st.alloc.num_links(), data.network.num_entries());
  }
}

TEST(SymSweep, EqualSeedsAreBitIdentical) {
  PlantedConfig config;
  config.n_nodes = 50;
  config.seed = 8;
  const auto data = planted_partition(config);
  auto run = [&] {
    auto st = sym_initialize(data.network, data.attributes, nullptr, 4, SymHypers{},
                             SamplerOptions{}, 99);
    RngStream rng(99, 0);
    for (int n = 0; n < 20; ++n) sym_sweep(st, data.network, data.attributes, rng);
    return st;
  };
  const auto a = run();
  const auto b = run();
  EXPECT_TRUE(a.phi == b.phi);
  EXPECT_TRUE(a.lambda == b.lambda);
  EXPECT_EQ(a.r, b.r);
  EXPECT_TRUE(a.prior.H == b.prior.H);
}

struct TraceSummary {
  double mean_log_lambda = 0.0;
  double se = 0.0;
};

TraceSummary trace_log_lambda_sum(const SparseBinaryMatrix& links, const AttributeMatrix& F,
                                  std::uint64_t seed, int burn, int keep) {
  auto st = sym_initialize(links, F, nullptr, 3, SymHypers{}, SamplerOptions{}, seed);
  RngStream rng(seed, 0);
  std::vector<double> trace;
  for (int n = 0; n < burn + keep; ++n) {
    sym_sweep(st, links, F, rng);
    if (n >= burn) trace.push_back(std::log(sum_of(st.lambda)));
  }
  return {mean(trace), batch_means_se(trace, 25)};
}

SparseBinaryMatrix small_network() {
  return SparseBinaryMatrix(8, Directedness::undirected,
                            {{0, 1}, {0, 2}, {1, 2}, {2, 3}, {4, 5}, {4, 6}, {5, 6}, {6, 7}, {3, 4}});
}

TEST(SymSweep, RelabelledNodesGiveTheSamePosteriorSummaries) {
  const auto links = small_network();
  const std::vector<NodeId> perm{5, 2, 7, 0, 3, 6, 1, 4};
  std::vector<NodePair> moved;
  for (const auto& e : links.entries()) moved.push_back({perm[e.row], perm[e.col]});
  const SparseBinaryMatrix relabelled(8, Directedness::undirected, moved);
  const AttributeMatrix F(8, 0);
  const auto a = trace_log_lambda_sum(links, F, 21, 500, 20000);
  const auto b = trace_log_lambda_sum(relabelled, F, 22, 500, 20000);
  EXPECT_LT(std::abs(a.mean_log_lambda - b.mean_log_lambda), 4.0 * std::hypot(a.se, b.se))
      << a.mean_log_lambda << " vs " << b.mean_log_lambda;
}

TEST(SymSweep, AllZeroAttributesMatchTheAttributeFreeModel) {
  const auto links = small_network();
  const auto with = trace_log_lambda_sum(links, AttributeMatrix(8, 3), 31, 500, 20000);
  const auto without = trace_log_lambda_sum(links, AttributeMatrix(8, 0), 32, 500, 20000);
  EXPECT_LT(std::abs(with.mean_log_lambda - without.mean_log_lambda),
            4.0 * std::hypot(with.se, without.se))
      << with.mean_log_lambda << " vs " << without.mean_log_lambda;
}

TEST(SymSweep, UnusedFactorsShrink) {
  PlantedConfig config;
  config.n_nodes = 80;
  config.n_communities = 3;
  config.p_in = 0.4;
  config.p_out = 0.01;
  config.seed = 9;
  const auto data = planted_partition(config);
  const std::size_t K = 20;
  auto st = sym_initialize(data.network, data.attributes, nullptr, K, SymHypers{},
                           SamplerOptions{}, 9);
  RngStream rng(9, 0);
  const int burn = 1000;
  const int keep = 500;
  std::vector<std::vector<double>> r_trace(K);
  std::vector<double> mass(K, 0.0);
  for (int n = 0; n < burn + keep; ++n) {
    sym_sweep(st, data.network, data.attributes, rng);
    if (n < burn) continue;
    for (std::size_t k = 0; k < K; ++k) {
      r_trace[k].push_back(st.r[k]);
      for (std::size_t i = 0; i < st.num_nodes(); ++i) {
        mass[k] += static_cast<double>(st.node_counts(i, k));
      }
    }
  }
  const double total = std::accumulate(mass.begin(), mass.end(), 0.0);
  auto median = [](std::vector<double> xs) {
    std::nth_element(xs.begin(), xs.begin() + xs.size() / 2, xs.end());
    return xs[xs.size() / 2];
  };
  std::vector<double> used;
  std::vector<double> unused;
  for (std::size_t k = 0; k < K; ++k) {
    (mass[k] > 0.02 * total ? used : unused).push_back(median(r_trace[k]));
  }
  ASSERT_FALSE(used.empty());
  ASSERT_FALSE(unused.empty());
  EXPECT_LT(median(unused), 0.1 * median(used))
      << "used " << used.size() << ", unused " << unused.size();
}

TEST(SymSimulate, VanishingBlocksGiveAnEmptyNetwork) {
  RngStream rng(10, 0);
  auto sim = sym_simulate(30, 3, SymHypers{}, AttributeMatrix(30, 0), nullptr, rng);
  for (auto& v : sim.state.lambda.values()) v = 1e-300;
  sym_sync_logs(sim.state);
  EXPECT_EQ(sym_resample_data(sim.state, rng).num_entries(), 0U);
}

TEST(SymSimulate, DensityMatchesTheMeanLinkProbability) {
  RngStream rng(11, 0);
  const std::size_t N = 25;
  std::vector<double> gap;
  for (int rep = 0; rep < 150; ++rep) {
    auto sim = sym_simulate(N, 3, SymHypers{}, AttributeMatrix(N, 0), nullptr, rng);
    double expected = 0.0;
    for (std::size_t i = 0; i < N; ++i) {
      for (std::size_t j = i + 1; j < N; ++j) {
        expected += sym_link_probability(sim.state.phi, sim.state.lambda, i, j);
      }
    }
    const double pairs = static_cast<double>(N * (N - 1) / 2);
    gap.push_back(static_cast<double>(sim.network.num_entries()) / pairs - expected / pairs);
  }
  EXPECT_LT(std::abs(mean(gap)), 4.0 * std::sqrt(testing::variance(gap) / gap.size()));
}

TEST(SymSimulate, StrongAttributeLoadingsProduceHomophily) {
  const std::size_t N = 40;
  std::vector<NodePair> active;
  for (NodeId i = 0; i < N; ++i) active.push_back({i, i < N / 2 ? 0U : 1U});
  const AttributeMatrix F(N, 2, active);
  RngStream rng(12, 0);
  auto sim = sym_simulate(N, 2, SymHypers{}, F, nullptr, rng);
  auto& st = sim.state;
  st.prior.H(0, 0) = st.prior.H(1, 1) = 20.0;
  st.prior.H(0, 1) = st.prior.H(1, 0) = 0.05;
  st.prior.b = {1.0, 1.0};
  refresh_g(st.prior, F);
  for (std::size_t i = 0; i < N; ++i) {
    st.c[i] = 10.0;
    for (std::size_t k = 0; k < 2; ++k) st.phi(i, k) = sample_gamma(st.prior.G(i, k), 10.0, rng);
  }
  st.lambda(0, 0) = st.lambda(1, 1) = 0.3;
  st.lambda(0, 1) = st.lambda(1, 0) = 0.01;
  sym_sync_logs(st);
  const auto network = sym_resample_data(st, rng);
  double within = 0.0;
  double across = 0.0;
  for (const auto& e : network.entries()) {
    ((e.row < N / 2) == (e.col < N / 2) ? within : across) += 1.0;
  }
  const double within_pairs = 2.0 * (N / 2) * (N / 2 - 1) / 2.0;
  const double across_pairs = (N / 2.0) * (N / 2.0);
  EXPECT_GT(within / within_pairs, 2.0 * across / across_pairs);
}

TEST(SymState, CheckFiniteRejectsNaN) {
  const auto links = single_link();
  auto st = sym_initialize(links, AttributeMatrix(2, 0), nullptr, 1, SymHypers{},
                           SamplerOptions{}, 13);
  EXPECT_NO_THROW(sym_check_finite(st));
  st.lambda(0, 0) = std::nan("");
  EXPECT_THROW(sym_check_finite(st), NumericalError);
}

TEST(SymState, RejectsDirectedInput) {
  const SparseBinaryMatrix directed(2, Directedness::directed, {{0, 1}});
  EXPECT_THROW(sym_initialize(directed, AttributeMatrix(2, 0), nullptr, 1, SymHypers{},
                              SamplerOptions{}, 14),
               ContractViolation);
}

}  // namespace
}  // namespace narm
