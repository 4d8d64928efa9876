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

// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any
// criterion fails. Criterion 9 needs a real dataset and reports SKIP when
// NARM_LAZEGA_EDGES is unset.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "auc_oracle.hpp"
#include "commands.hpp"
#include "config.hpp"
#include "distribution_suite.hpp"
#include "geweke.hpp"
#include "narm/evaluation.hpp"
#include "narm/data.hpp"
#include "narm/sampler.hpp"
#include "narm/synthetic.hpp"

namespace narm {
namespace {

enum class Verdict { pass, fail, skip };

struct Outcome {
  Verdict verdict = Verdict::fail;
  std::string detail;
};

Outcome verdict(bool ok, std::string detail) {
  return {ok ? Verdict::pass : Verdict::fail, std::move(detail)};
}

std::string fmt(double v, int digits = 4) {
  std::ostringstream out;
  out.precision(digits);
  out << v;
  return out.str();
}

// 1. Moment, chi-square and KS checks of every sampler, CRT against
// Stirling numbers for n <= 8, in under a minute.
Outcome distributions() {
  const auto start = std::chrono::steady_clock::now();
  const auto checks = testing::distribution_suite(1, 100000);
  const double secs =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  std::string failed;
  for (const auto& c : checks) {
    if (!c.pass) failed += " [" + c.name + ": " + c.detail + "]";
  }
  return verdict(failed.empty() && secs < 60.0,
                 std::to_string(checks.size()) + " checks, " + fmt(secs, 3) + " s" + failed);
}

// 2. Geweke joint-consistency of both flat toy models.
Outcome geweke() {
  std::string detail;
  bool ok = true;
  const auto start = std::chrono::steady_clock::now();
  for (const bool sym : {true, false}) {
    testing::GewekeConfig config;
    config.seed = sym ? 11 : 21;
    const auto stats = sym ? testing::sym_geweke(config) : testing::asym_geweke(config);
    double worst = 0.0;
    std::string worst_name;
    for (const auto& s : stats) {
      if (!s.pass()) {
        ok = false;
        detail += " [" + testing::describe(s) + "]";
      }
      if (std::abs(s.z()) > worst) {
        worst = std::abs(s.z());
        worst_name = s.name;
      }
    }
    detail += std::string(sym ? "sym" : " asym") + ": " + std::to_string(stats.size()) +
              " statistics, max |z| " + fmt(worst, 3) + " (" + worst_name + ");";
  }
  const double secs =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return verdict(ok && secs < 1200.0, detail + " " + fmt(secs, 3) + " s");
}

// 3. Shape cache, allocation conservation and Theta normalisation over 1000
// sweeps, with the periodic full refresh of the cache switched off.
Outcome invariants() {
  double worst_cache = 0.0;
  double worst_column = 0.0;
  std::size_t bad_links = 0;
  const auto check_alloc = [&](const LinkAllocations& alloc) {
    for (std::size_t e = 0; e < alloc.num_links(); ++e) {
      long long sum = 0;
      for (long long c : alloc.counts_of(e)) sum += c;
      if (sum != alloc.totals[e] || alloc.totals[e] < 1) ++bad_links;
    }
  };
  ModelConfig model;
  model.n_factors = 6;
  model.options.refresh_every = 0;
  {
    PlantedConfig pc;
    pc.n_nodes = 80;
    pc.seed = 31;
    const auto data = planted_partition(pc);
    Sampler sampler(model, data.network, data.attributes, nullptr, 31);
    for (int s = 0; s < 1000; ++s) {
      sampler.sweep();
      worst_cache = std::max(worst_cache, shape_cache_error(sampler.prior(), data.attributes));
      check_alloc(sampler.sym()->alloc);
    }
  }
  {
    HierarchicalConfig hc;
    hc.n_nodes = 80;
    hc.seed = 32;
    const auto data = planted_hierarchy(hc);
    model.kind = ModelKind::asym;
    Sampler sampler(model, data.network, data.attributes, &data.parents, 32);
    for (int s = 0; s < 1000; ++s) {
      sampler.sweep();
      worst_cache = std::max(worst_cache, shape_cache_error(sampler.prior(), data.attributes));
      const auto& st = *sampler.asym();
      check_alloc(st.alloc);
      for (std::size_t k = 0; k < st.num_factors(); ++k) {
        double column = 0.0;
        for (std::size_t j = 0; j < st.num_nodes(); ++j) column += st.theta(j, k);
        worst_column = std::max(worst_column, std::abs(column - 1.0));
      }
    }
  }
  return verdict(worst_cache <= 1e-8 && bad_links == 0 && worst_column <= 1e-10,
                 "max relative G error " + fmt(worst_cache, 3) + ", broken allocations " +
                     std::to_string(bad_links) + ", max |column sum - 1| " +
                     fmt(worst_column, 3));
}

SparseBinaryMatrix random_undirected(std::size_t n, std::size_t edges, std::uint64_t seed) {
  std::mt19937_64 gen(seed);
  std::uniform_int_distribution<NodeId> pick(0, static_cast<NodeId>(n - 1));
  std::set<NodePair> chosen;
  while (chosen.size() < edges) {
    NodeId i = pick(gen);
    NodeId j = pick(gen);
    if (i == j) continue;
    chosen.insert({std::min(i, j), std::max(i, j)});
  }
  return SparseBinaryMatrix(n, Directedness::undirected, {chosen.begin(), chosen.end()});
}

// 4. The count step visits exactly the training links, and the allocation
// store grows with links times factors.
Outcome sparsity() {
  const std::size_t N = 2000;
  const std::size_t K = 10;
  const auto network = random_undirected(N, 6000, 41);
  const auto set = make_split(network, SplitSpec{SplitMode::by_links, 0.8, 41, false});
  const auto train = set.train_links();
  ModelConfig model;
  model.n_factors = K;
  Sampler sampler(model, train, AttributeMatrix(N, 0), nullptr, 41);
  bool exact = true;
  std::size_t touched = 0;
  for (int s = 0; s < 5; ++s) {
    SweepStats stats;
    sampler.sweep(&stats);
    touched = stats.pairs_touched;
    exact = exact && stats.pairs_touched == train.num_entries();
  }
  const auto& alloc = sampler.sym()->alloc;
  const std::size_t bytes = alloc.totals.capacity() * sizeof(long long) +
                            alloc.offsets.capacity() * sizeof(std::size_t) +
                            alloc.cells.capacity() * sizeof(std::uint32_t) +
                            alloc.counts.capacity() * sizeof(long long);
  const std::size_t budget = train.num_entries() * (2 * sizeof(std::size_t) + 2 * K * 8);
  const bool bounded = alloc.num_links() == train.num_entries() &&
                       alloc.stored_cells() <= train.num_entries() * K * K && bytes <= budget;
  return verdict(exact && bounded,
                 "train links " + std::to_string(train.num_entries()) + ", pairs touched " +
                     std::to_string(touched) + ", stored cells " +
                     std::to_string(alloc.stored_cells()) + ", allocation bytes " +
                     std::to_string(bytes) + " (budget " + std::to_string(budget) +
                     "; N^2 = " + std::to_string(N * N) + ")");
}

// 5. Per-sweep time across doublings of the edge count and of the number of
// attributes at fixed activity.
Outcome scaling() {
  std::string detail;
  bool ok = true;
  for (const char* model : {"sym", "asym"}) {
    cli::RunConfig config;
    config.model = model;
    cli::BenchOptions options;
    config.k_max = options.factors;
    const auto report = cli::run_bench(config, options);
    ok = ok && report.edge_doubling_ratio < 2.5 && report.attr_doubling_ratio < 2.5;
    if (!detail.empty()) detail += "; ";
    detail += std::string(model) + ": edge ratio " + fmt(report.edge_doubling_ratio, 3) +
              ", attribute-phase ratio " + fmt(report.attr_doubling_ratio, 3);
  }
  return verdict(ok, detail);
}

double mean_auc(const ModelConfig& model, const SparseBinaryMatrix& network,
                const AttributeMatrix& F, const AttributeMatrix* parents, double train_fraction,
                std::uint64_t seed) {
  const auto set = make_split(network, SplitSpec{SplitMode::by_links, train_fraction, seed, false});
  return evaluate_run(model, set, F, parents, default_schedule(model.kind), seed, 0).auc_roc;
}

// 6. Attributes help more when less of the network is observed.
Outcome attribute_benefit() {
  const std::vector<std::uint64_t> seeds{1, 2, 3, 4, 5};
  ModelConfig model;
  model.n_factors = 4;
  double gap20 = 0.0;
  double gap80 = 0.0;
  double on20 = 0.0;
  for (auto seed : seeds) {
    PlantedConfig pc;
    pc.n_nodes = 100;
    pc.n_communities = 4;
    pc.seed = seed;
    const auto data = planted_partition(pc);
    const AttributeMatrix none(pc.n_nodes, 0);
    const double with20 = mean_auc(model, data.network, data.attributes, nullptr, 0.2, seed);
    const double without20 = mean_auc(model, data.network, none, nullptr, 0.2, seed);
    const double with80 = mean_auc(model, data.network, data.attributes, nullptr, 0.8, seed);
    const double without80 = mean_auc(model, data.network, none, nullptr, 0.8, seed);
    on20 += with20 / seeds.size();
    gap20 += (with20 - without20) / seeds.size();
    gap80 += (with80 - without80) / seeds.size();
  }
  return verdict(gap20 >= 0.05 && gap20 > gap80,
                 "AUC-ROC with attributes at 20% " + fmt(on20) + "; gap at 20% " + fmt(gap20) +
                     ", gap at 80% " + fmt(gap80));
}

// 7. The second attribute level helps the directed model on data whose
// first-level attributes are noisy children of informative parents.
Outcome hierarchy_benefit() {
  const std::vector<std::uint64_t> seeds{1, 2, 3, 4, 5};
  ModelConfig model;
  model.kind = ModelKind::asym;
  model.n_factors = 4;
  double hier = 0.0;
  double flat = 0.0;
  double off = 0.0;
  // Receiver loadings carry no attribute prior and are learned from in-links
  // alone; with only a fifth of the links every arm stays near chance.
  const double train = 0.8;
  for (auto seed : seeds) {
    HierarchicalConfig hc;
    hc.seed = seed;
    const auto data = planted_hierarchy(hc);
    const double n = static_cast<double>(seeds.size());
    hier += mean_auc(model, data.network, data.attributes, &data.parents, train, seed) / n;
    flat += mean_auc(model, data.network, data.attributes, nullptr, train, seed) / n;
    off += mean_auc(model, data.network, AttributeMatrix(hc.n_nodes, 0), nullptr, train, seed) /
           n;
  }
  return verdict(hier >= flat - 0.01 && hier >= off + 0.03,
                 "AUC-ROC at 80% training: hierarchy " + fmt(hier) + ", flat " + fmt(flat) +
                     ", no attributes " + fmt(off));
}

// 8. Both metrics against brute-force oracles on small random instances.
Outcome oracle_equivalence() {
  std::mt19937_64 gen(8);
  std::uniform_int_distribution<int> size(2, 12);
  std::uniform_int_distribution<int> level(0, 5);
  std::bernoulli_distribution coin(0.5);
  double worst = 0.0;
  for (int instance = 0; instance < 1000; ++instance) {
    const int n = size(gen);
    std::vector<double> scores(n);
    std::vector<int> labels(n);
    for (int k = 0; k < n; ++k) {
      scores[k] = 0.1 * level(gen);
      labels[k] = coin(gen) ? 1 : 0;
    }
    labels[0] = 1;
    labels[1] = 0;
    std::shuffle(labels.begin(), labels.end(), gen);
    worst = std::max(worst, std::abs(auc_roc(scores, labels) -
                                     testing::auc_roc_bruteforce(scores, labels)));
    worst = std::max(worst, std::abs(auc_pr(scores, labels) -
                                     testing::auc_pr_bruteforce(scores, labels)));
  }
  return verdict(worst <= 1e-12, "1000 instances, max difference " + fmt(worst, 3));
}

// 9. Lazega co-work network at 80% training, if provided.
Outcome lazega() {
  const char* edges = std::getenv("NARM_LAZEGA_EDGES");
  if (edges == nullptr || *edges == '\0') {
    return {Verdict::skip, "set NARM_LAZEGA_EDGES (and optionally NARM_LAZEGA_ATTRIBUTES)"};
  }
  const auto network = load_edge_list(edges, Directedness::undirected);
  AttributeMatrix F(network.n_nodes(), 0);
  if (const char* attrs = std::getenv("NARM_LAZEGA_ATTRIBUTES"); attrs != nullptr && *attrs) {
    F = load_attributes(attrs, network.n_nodes());
  }
  ModelConfig model;
  model.n_factors = 50;
  double auc = 0.0;
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    auc += mean_auc(model, network, F, nullptr, 0.8, seed) / 5.0;
  }
  return verdict(auc > 0.65, "mean AUC-ROC over 5 splits " + fmt(auc));
}

}  // namespace
}  // namespace narm

int main() {
  using narm::Verdict;
  const std::vector<std::pair<const char*, std::function<narm::Outcome()>>> criteria{
      {"distribution suite", narm::distributions},
      {"Geweke joint consistency", narm::geweke},
      {"cache and conservation invariants", narm::invariants},
      {"count-step sparsity", narm::sparsity},
      {"complexity scaling", narm::scaling},
      {"attribute benefit under missing links", narm::attribute_benefit},
      {"hierarchical attributes", narm::hierarchy_benefit},
      {"metric oracle equivalence", narm::oracle_equivalence},
      {"Lazega co-work network", narm::lazega},
  };
  bool all = true;
  for (std::size_t c = 0; c < criteria.size(); ++c) {
    const auto start = std::chrono::steady_clock::now();
    narm::Outcome outcome;
    try {
      outcome = criteria[c].second();
    } catch (const std::exception& e) {
      outcome = {Verdict::fail, std::string("exception: ") + e.what()};
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    const char* tag = outcome.verdict == Verdict::pass   ? "PASS"
                      : outcome.verdict == Verdict::skip ? "SKIP"
                                                         : "FAIL";
    all = all && outcome.verdict != Verdict::fail;
    std::printf("%s criterion %zu (%s): %s [%.1f s]\n", tag, c + 1, criteria[c].first,
                outcome.detail.c_str(), secs);
    std::fflush(stdout);
  }
  return all ? 0 : 1;
}
