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

// Planted-community generators whose attributes carry information about the
// communities. Used by tests, benchmarks and the `simulate` command.

#include <cstddef>
#include <cstdint>
#include <vector>

#include "narm/data.hpp"

namespace narm {

struct PlantedConfig {
  std::size_t n_nodes = 100;
  std::size_t n_communities = 4;
  Directedness directedness = Directedness::undirected;
  double p_in = 0.3;    // link probability inside a community
  double p_out = 0.02;  // link probability across communities
  /// Attributes owned by each community; a node carries each attribute of
  /// its own community with probability `attr_on` and each other attribute
  /// with probability `attr_noise`.
  std::size_t attrs_per_community = 2;
  double attr_on = 0.8;
  double attr_noise = 0.05;
  std::uint64_t seed = 0;
};

struct PlantedData {
  SparseBinaryMatrix network;
  AttributeMatrix attributes;
  std::vector<std::size_t> community;  // per node
};

/// Nodes are assigned to communities round-robin in a shuffled order, so
/// community sizes differ by at most one.
PlantedData planted_partition(const PlantedConfig& config);

struct HierarchicalConfig {
  std::size_t n_nodes = 100;
  std::size_t n_communities = 4;  // one informative parent attribute each
  Directedness directedness = Directedness::directed;
  double p_in = 0.25;
  double p_out = 0.02;
  /// First-level attributes under each parent. A node carries each child of
  /// its community's parent with probability `child_on`, and every other
  /// child with probability `child_noise`.
  std::size_t children_per_parent = 6;
  double child_on = 0.3;
  double child_noise = 0.08;
  std::uint64_t seed = 0;
};

struct HierarchicalData {
  SparseBinaryMatrix network;
  AttributeMatrix attributes;  // N x L, L = n_communities * children_per_parent
  AttributeMatrix parents;     // L x M, each child has exactly one parent
  std::vector<std::size_t> community;
};

HierarchicalData planted_hierarchy(const HierarchicalConfig& config);

}  // namespace narm
