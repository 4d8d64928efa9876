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

#include "geweke.hpp"

#include <cmath>
#include <functional>
#include <sstream>

#include "narm/asym_narm.hpp"
#include "narm/sym_narm.hpp"
#include "stats.hpp"

namespace narm::testing {
namespace {

constexpr std::size_t kNodes = 6;
constexpr std::size_t kFactors = 2;
constexpr std::size_t kBatches = 50;

double mean_of(std::span<const double> v) { return mean(v); }

// Loadings and counts are heavy-tailed under the toy priors, and batch means
// of raw values converge too slowly to compare reliably. Plain logs are no
// better: a gamma draw with a tiny shape has a log near -1/shape. log1p keeps
// both tails light and still tests the same conditionals.
double mean_log1p(std::span<const double> v) {
  double s = 0.0;
  for (double x : v) s += std::log1p(x);
  return s / static_cast<double>(v.size());
}

double mean_of(const CountMatrix& m) {
  double s = 0.0;
  for (auto v : m.values()) s += static_cast<double>(v);
  return s / static_cast<double>(m.values().size());
}

double mean_log1p(const CountMatrix& m) {
  double s = 0.0;
  for (auto v : m.values()) s += std::log1p(static_cast<double>(v));
  return s / static_cast<double>(m.values().size());
}

using StatFn = std::function<std::vector<double>()>;

std::vector<GewekeStat> compare(const std::vector<std::string>& names,
                                const std::vector<std::vector<double>>& marginal,
                                const std::vector<std::vector<double>>& successive) {
  std::vector<GewekeStat> out;
  for (std::size_t s = 0; s < names.size(); ++s) {
    std::vector<double> a(marginal.size());
    std::vector<double> b(successive.size());
    for (std::size_t k = 0; k < a.size(); ++k) a[k] = marginal[k][s];
    for (std::size_t k = 0; k < b.size(); ++k) b[k] = successive[k][s];
    GewekeStat g;
    g.name = names[s];
    g.marginal_mean = mean(a);
    g.marginal_se = std::sqrt(variance(a) / static_cast<double>(a.size()));
    g.successive_mean = mean(b);
    g.successive_se = batch_means_se(b, kBatches);
    out.push_back(g);
  }
  return out;
}

std::vector<std::string> prior_names(bool hierarchy) {
  std::vector<std::string> names{"log1p H", "log1p b", "log1p T", "mean H", "mean b", "mean T"};
  if (hierarchy) names.insert(names.end(), {"log1p delta", "log1p second-level tables"});
  return names;
}

void push_prior_stats(std::vector<double>& row, const AttributePriorState& prior) {
  row.push_back(mean_log1p(prior.H.values()));
  row.push_back(mean_log1p(prior.b));
  row.push_back(mean_log1p(prior.T));
  row.push_back(mean_of(prior.H.values()));
  row.push_back(mean_of(prior.b));
  row.push_back(mean_of(prior.T));
  if (prior.hierarchy) {
    row.push_back(mean_log1p(prior.hierarchy->delta.values()));
    row.push_back(mean_log1p(prior.hierarchy->tables));
  }
}

SymHypers toy_sym_hypers(double mu0) {
  SymHypers h;
  h.mu0 = mu0;
  // Hyper-prior mass away from zero keeps E[1/c] and its higher moments
  // finite, so the statistics below have finite variance.
  h.e0 = 10.0;
  h.f0 = 10.0;
  return h;
}

AsymHypers toy_asym_hypers(double mu0) {
  AsymHypers h;
  h.mu0 = mu0;
  // q ~ Beta(3, 7): phi's scale q / (1 - q) has finite variance.
  h.c0 = 10.0;
  h.epsilon = 0.3;
  h.e0 = 10.0;
  h.f0 = 10.0;
  return h;
}

}  // namespace

double GewekeStat::z() const {
  const double se = std::sqrt(marginal_se * marginal_se + successive_se * successive_se);
  return se > 0.0 ? (marginal_mean - successive_mean) / se : 0.0;
}

bool GewekeStat::pass(double limit) const { return std::isfinite(z()) && std::abs(z()) < limit; }

std::string describe(const GewekeStat& g) {
  std::ostringstream out;
  out << g.name << ": marginal " << g.marginal_mean << " +- " << g.marginal_se
      << ", successive " << g.successive_mean << " +- " << g.successive_se << ", z " << g.z();
  return out.str();
}

AttributeMatrix toy_attributes() {
  return AttributeMatrix(kNodes, 2, {{0, 0}, {1, 0}, {1, 1}, {2, 1}, {4, 0}, {5, 1}});
}

AttributeMatrix toy_parents() { return AttributeMatrix(2, 1, {{0, 0}, {1, 0}}); }

std::vector<GewekeStat> sym_geweke(const GewekeConfig& cfg) {
  const auto F = toy_attributes();
  const auto parents = toy_parents();
  const AttributeMatrix* pp = cfg.hierarchy ? &parents : nullptr;
  const auto hypers = toy_sym_hypers(cfg.mu0);

  std::vector<std::string> names{"log1p phi", "log1p lambda", "log1p r", "log1p c", "log a0", "links", "mean phi", "mean lambda"};
  if (cfg.options.resample_hypers) {
    names.insert(names.end(), {"log gamma0", "log epsilon", "log c0"});
  }
  const auto prior = prior_names(cfg.hierarchy);
  names.insert(names.end(), prior.begin(), prior.end());

  const auto stats = [&](const SymState& st, const SparseBinaryMatrix& y) {
    std::vector<double> row{mean_log1p(st.phi.values()), mean_log1p(st.lambda.values()),
                            mean_log1p(st.r), mean_log1p(st.c), std::log(st.hypers.a0),
                            static_cast<double>(y.num_entries()),
                            mean_of(st.phi.values()), mean_of(st.lambda.values())};
    if (cfg.options.resample_hypers) {
      row.insert(row.end(), {std::log(st.hypers.gamma0), std::log(st.hypers.epsilon),
                             std::log(st.hypers.c0)});
    }
    push_prior_stats(row, st.prior);
    return row;
  };

  RngStream rng(cfg.seed, 0x6e7e);
  std::vector<std::vector<double>> marginal;
  marginal.reserve(cfg.draws);
  for (std::size_t d = 0; d < cfg.draws; ++d) {
    auto sim = sym_simulate(kNodes, kFactors, hypers, F, pp, rng, cfg.options);
    marginal.push_back(stats(sim.state, sim.network));
  }

  auto sim = sym_simulate(kNodes, kFactors, hypers, F, pp, rng, cfg.options);
  SymState st = std::move(sim.state);
  SparseBinaryMatrix y = std::move(sim.network);
  std::vector<std::vector<double>> successive;
  successive.reserve(cfg.draws);
  for (std::size_t d = 0; d < cfg.draws; ++d) {
    sym_sweep(st, y, F, rng, cfg.options);
    successive.push_back(stats(st, y));
    y = sym_resample_data(st, rng);
  }
  return compare(names, marginal, successive);
}

std::vector<GewekeStat> asym_geweke(const GewekeConfig& cfg) {
  const auto F = toy_attributes();
  const auto parents = toy_parents();
  const AttributeMatrix* pp = cfg.hierarchy ? &parents : nullptr;
  const auto hypers = toy_asym_hypers(cfg.mu0);
  SamplerOptions options = cfg.options;
  options.resample_hypers = false;

  std::vector<std::string> names{"log1p phi", "mean q", "theta(0,0)", "mean theta^2",
                                 "log1p self counts", "links", "mean phi"};
  const auto prior = prior_names(cfg.hierarchy);
  names.insert(names.end(), prior.begin(), prior.end());

  const auto stats = [&](const AsymState& st, const SparseBinaryMatrix& y) {
    double sq = 0.0;
    for (double v : st.theta.values()) sq += v * v;
    std::vector<double> row{mean_log1p(st.phi.values()),
                            mean_of(st.q),
                            st.theta(0, 0),
                            sq / static_cast<double>(st.theta.values().size()),
                            mean_log1p(st.self_counts),
                            static_cast<double>(y.num_entries()),
                            mean_of(st.phi.values())};
    push_prior_stats(row, st.prior);
    return row;
  };

  RngStream rng(cfg.seed, 0xa5e7);
  std::vector<std::vector<double>> marginal;
  marginal.reserve(cfg.draws);
  for (std::size_t d = 0; d < cfg.draws; ++d) {
    auto sim = asym_simulate(kNodes, kFactors, hypers, F, pp, rng, options);
    marginal.push_back(stats(sim.state, sim.network));
  }

  auto sim = asym_simulate(kNodes, kFactors, hypers, F, pp, rng, options);
  AsymState st = std::move(sim.state);
  SparseBinaryMatrix y = std::move(sim.network);
  std::vector<std::vector<double>> successive;
  successive.reserve(cfg.draws);
  for (std::size_t d = 0; d < cfg.draws; ++d) {
    asym_sweep(st, y, F, rng, options);
    successive.push_back(stats(st, y));
    y = asym_resample_data(st, rng);
  }
  return compare(names, marginal, successive);
}

}  // namespace narm::testing
