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

#include "narm/synthetic.hpp"

#include <algorithm>
#include <numeric>

#include "narm/errors.hpp"
#include "narm/rng.hpp"

namespace narm {
namespace {

std::vector<std::size_t> assign_communities(std::size_t n, std::size_t c, RngStream& rng) {
  NARM_EXPECTS(c >= 1 && c <= n, "need between 1 and N communities");
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::shuffle(order.begin(), order.end(), rng);
  std::vector<std::size_t> community(n);
  for (std::size_t r = 0; r < n; ++r) community[order[r]] = r % c;
  return community;
}

SparseBinaryMatrix block_network(const std::vector<std::size_t>& community, Directedness dir,
                                 double p_in, double p_out, RngStream& rng) {
  NARM_EXPECTS(p_in >= 0.0 && p_in <= 1.0 && p_out >= 0.0 && p_out <= 1.0,
               "link probabilities must lie in [0, 1]");
  const std::size_t n = community.size();
  std::vector<NodePair> pairs;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (i == j || (dir == Directedness::undirected && j < i)) continue;
      const double p = community[i] == community[j] ? p_in : p_out;
      if (rng.uniform() < p) pairs.push_back({static_cast<NodeId>(i), static_cast<NodeId>(j)});
    }
  }
  return SparseBinaryMatrix(n, dir, std::move(pairs));
}

}  // namespace

PlantedData planted_partition(const PlantedConfig& cfg) {
  RngStream rng(cfg.seed, 0x51a7);
  auto community = assign_communities(cfg.n_nodes, cfg.n_communities, rng);
  auto network = block_network(community, cfg.directedness, cfg.p_in, cfg.p_out, rng);
  const std::size_t L = cfg.n_communities * cfg.attrs_per_community;
  std::vector<NodePair> active;
  for (std::size_t i = 0; i < cfg.n_nodes; ++i) {
    for (std::size_t l = 0; l < L; ++l) {
      const bool own = l / cfg.attrs_per_community == community[i];
      if (rng.uniform() < (own ? cfg.attr_on : cfg.attr_noise)) {
        active.push_back({static_cast<NodeId>(i), static_cast<NodeId>(l)});
      }
    }
  }
  return {std::move(network), AttributeMatrix(cfg.n_nodes, L, std::move(active)),
          std::move(community)};
}

HierarchicalData planted_hierarchy(const HierarchicalConfig& cfg) {
  RngStream rng(cfg.seed, 0x41e7);
  auto community = assign_communities(cfg.n_nodes, cfg.n_communities, rng);
  auto network = block_network(community, cfg.directedness, cfg.p_in, cfg.p_out, rng);
  const std::size_t M = cfg.n_communities;
  const std::size_t L = M * cfg.children_per_parent;
  std::vector<NodePair> active;
  for (std::size_t i = 0; i < cfg.n_nodes; ++i) {
    for (std::size_t l = 0; l < L; ++l) {
      const bool own = l / cfg.children_per_parent == community[i];
      if (rng.uniform() < (own ? cfg.child_on : cfg.child_noise)) {
        active.push_back({static_cast<NodeId>(i), static_cast<NodeId>(l)});
      }
    }
  }
  std::vector<NodePair> edges;
  for (std::size_t l = 0; l < L; ++l) {
    edges.push_back({static_cast<NodeId>(l), static_cast<NodeId>(l / cfg.children_per_parent)});
  }
  return {std::move(network), AttributeMatrix(cfg.n_nodes, L, std::move(active)),
          AttributeMatrix(L, M, std::move(edges)), std::move(community)};
}

}  // namespace narm
