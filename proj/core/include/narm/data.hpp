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

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace narm {

using NodeId = std::uint32_t;

enum class Directedness { directed, undirected };

struct NodePair {
  NodeId row = 0;
  NodeId col = 0;
  friend auto operator<=>(const NodePair&, const NodePair&) = default;
};

/// Binary adjacency matrix with CSR row access. Undirected matrices store
/// each link once as (i, j) with i < j; self-loops are never stored.
class SparseBinaryMatrix {
 public:
  SparseBinaryMatrix() = default;
  /// Builds the matrix from raw pairs: canonicalises undirected pairs,
  /// removes duplicates and self-loops. Throws DataError on out-of-range ids.
  SparseBinaryMatrix(std::size_t n_nodes, Directedness directedness,
                     std::vector<NodePair> pairs);

  std::size_t n_rows() const { return n_nodes_; }
  std::size_t n_cols() const { return n_nodes_; }
  std::size_t n_nodes() const { return n_nodes_; }
  Directedness directedness() const { return directedness_; }
  bool directed() const { return directedness_ == Directedness::directed; }

  std::size_t num_entries() const { return entries_.size(); }
  /// Stored entries sorted by (row, col).
  std::span<const NodePair> entries() const { return entries_; }
  std::span<const NodePair> row(NodeId i) const;

  /// Link query; for undirected matrices (j, i) is answered via (i, j).
  bool contains(NodeId i, NodeId j) const;

  /// Pairs removed at construction (self-loops, duplicates).
  std::size_t dropped_self_loops() const { return dropped_self_loops_; }
  std::size_t dropped_duplicates() const { return dropped_duplicates_; }

  friend bool operator==(const SparseBinaryMatrix& a, const SparseBinaryMatrix& b) {
    return a.n_nodes_ == b.n_nodes_ && a.directedness_ == b.directedness_ &&
           a.entries_ == b.entries_;
  }

 private:
  std::size_t n_nodes_ = 0;
  Directedness directedness_ = Directedness::undirected;
  std::vector<NodePair> entries_;
  std::vector<std::size_t> offsets_;
  std::size_t dropped_self_loops_ = 0;
  std::size_t dropped_duplicates_ = 0;
};

/// Binary attribute matrix (n_nodes x n_attrs) with both row and column
/// access. Also used for the second-level hierarchy (L x M).
class AttributeMatrix {
 public:
  AttributeMatrix() = default;
  /// An all-zero matrix.
  AttributeMatrix(std::size_t n_nodes, std::size_t n_attrs);
  /// (node, attribute) pairs; duplicates collapse. Throws DataError on
  /// out-of-range ids.
  AttributeMatrix(std::size_t n_nodes, std::size_t n_attrs,
                  std::vector<NodePair> active);

  std::size_t n_nodes() const { return n_nodes_; }
  std::size_t n_attrs() const { return n_attrs_; }
  std::size_t num_nonzeros() const { return row_ids_.size(); }

  /// Attributes active on a node, ascending.
  std::span<const NodeId> attributes_of(std::size_t node) const {
    return {row_ids_.data() + row_offsets_[node],
            row_offsets_[node + 1] - row_offsets_[node]};
  }
  /// Nodes on which an attribute is active, ascending.
  std::span<const NodeId> nodes_with(std::size_t attr) const {
    return {col_ids_.data() + col_offsets_[attr],
            col_offsets_[attr + 1] - col_offsets_[attr]};
  }
  bool active(std::size_t node, std::size_t attr) const;

  /// (node, attribute) pairs in row order.
  std::vector<NodePair> pairs() const;

  friend bool operator==(const AttributeMatrix&, const AttributeMatrix&) = default;

 private:
  std::size_t n_nodes_ = 0;
  std::size_t n_attrs_ = 0;
  std::vector<std::size_t> row_offsets_{0};
  std::vector<NodeId> row_ids_;
  std::vector<std::size_t> col_offsets_{0};
  std::vector<NodeId> col_ids_;
};

// ---------------------------------------------------------------------------
// Text formats. Whitespace separated, '#' starts a comment line, and an
// optional '%' header carries the dimensions ("%N" or "%N L").

struct LoadStats {
  std::size_t lines = 0;
  std::size_t self_loops = 0;
  std::size_t duplicates = 0;
};

SparseBinaryMatrix load_edge_list(const std::filesystem::path& path,
                                  Directedness directedness,
                                  std::optional<std::size_t> n_nodes = std::nullopt,
                                  LoadStats* stats = nullptr);
void write_edge_list(const std::filesystem::path& path,
                     const SparseBinaryMatrix& matrix);

AttributeMatrix load_attributes(const std::filesystem::path& path,
                                std::optional<std::size_t> n_nodes = std::nullopt,
                                std::optional<std::size_t> n_attrs = std::nullopt);
void write_attributes(const std::filesystem::path& path,
                      const AttributeMatrix& matrix);

/// Hierarchy file: "attr_id parent_attr_id" per line, giving F' (L x M).
AttributeMatrix load_hierarchy(const std::filesystem::path& path,
                               std::size_t n_first_level,
                               std::optional<std::size_t> n_parents = std::nullopt);
void write_hierarchy(const std::filesystem::path& path,
                     const AttributeMatrix& hierarchy);

/// Side file mapping dense ids to external labels: "id label" per line.
std::vector<std::string> load_label_map(const std::filesystem::path& path);

// ---------------------------------------------------------------------------
// Categorical encoding.

struct CategoricalTable {
  std::vector<std::string> fields;
  /// values[node][field]; nullopt marks a missing value.
  std::vector<std::vector<std::optional<std::string>>> values;
};

struct CategoricalEncoding {
  AttributeMatrix matrix;
  /// "field=level" for every output column.
  std::vector<std::string> column_names;
  /// (node, field) pairs that had no value.
  std::vector<std::pair<std::size_t, std::size_t>> missing;
};

/// One binary column per (field, level), levels in order of first
/// appearance.
CategoricalEncoding encode_categorical(const CategoricalTable& table);

// ---------------------------------------------------------------------------
// Train/test splits.

enum class SplitMode { by_links, by_nodes };

struct SplitSpec {
  SplitMode mode = SplitMode::by_links;
  double train_fraction = 0.8;
  std::uint64_t seed = 0;
  /// Use every non-link as a negative instead of 1:1 sampling.
  bool all_negatives = false;
};

struct LabeledPair {
  NodeId i = 0;
  NodeId j = 0;
  int y = 0;
  friend bool operator==(const LabeledPair&, const LabeledPair&) = default;
};

struct EvalSet {
  std::size_t n_nodes = 0;
  Directedness directedness = Directedness::undirected;
  std::vector<LabeledPair> train;
  std::vector<LabeledPair> test;

  /// Training links as an adjacency matrix.
  SparseBinaryMatrix train_links() const;
  std::size_t train_positives() const;
  std::size_t test_positives() const;

  friend bool operator==(const EvalSet&, const EvalSet&) = default;
};

/// Upper bound on candidate pairs for the all-negatives mode.
inline constexpr std::size_t kMaxAllNegativesPairs = 1'000'000;

EvalSet make_split(const SparseBinaryMatrix& network, const SplitSpec& spec);

/// Split manifest: "i j y fold" per line, fold in {train, test}.
void write_manifest(const std::filesystem::path& path, const EvalSet& set);
EvalSet load_manifest(const std::filesystem::path& path, std::size_t n_nodes,
                      Directedness directedness);

}  // namespace narm
