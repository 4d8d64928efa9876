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

#include "narm/data.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

#include "narm/errors.hpp"
#include "narm/io.hpp"
#include "narm/rng.hpp"

namespace narm {

// ---------------------------------------------------------------------------
// SparseBinaryMatrix

SparseBinaryMatrix::SparseBinaryMatrix(std::size_t n_nodes, Directedness directedness,
                                       std::vector<NodePair> pairs)
    : n_nodes_(n_nodes), directedness_(directedness) {
  entries_.reserve(pairs.size());
  for (NodePair p : pairs) {
    if (p.row >= n_nodes || p.col >= n_nodes) {
      throw DataError("node id out of range (" + std::to_string(p.row) + ", " +
                      std::to_string(p.col) + ") for " + std::to_string(n_nodes) +
                      " nodes");
    }
    if (p.row == p.col) {
      ++dropped_self_loops_;
      continue;
    }
    if (directedness == Directedness::undirected && p.row > p.col) {
      std::swap(p.row, p.col);
    }
    entries_.push_back(p);
  }
  std::sort(entries_.begin(), entries_.end());
  const auto before = entries_.size();
  entries_.erase(std::unique(entries_.begin(), entries_.end()), entries_.end());
  dropped_duplicates_ = before - entries_.size();

  offsets_.assign(n_nodes + 1, 0);
  for (const auto& e : entries_) ++offsets_[e.row + 1];
  std::partial_sum(offsets_.begin(), offsets_.end(), offsets_.begin());
}

std::span<const NodePair> SparseBinaryMatrix::row(NodeId i) const {
  return {entries_.data() + offsets_[i], offsets_[i + 1] - offsets_[i]};
}

bool SparseBinaryMatrix::contains(NodeId i, NodeId j) const {
  if (i >= n_nodes_ || j >= n_nodes_ || i == j) return false;
  if (!directed() && i > j) std::swap(i, j);
  const auto r = row(i);
  return std::binary_search(r.begin(), r.end(), NodePair{i, j});
}

// ---------------------------------------------------------------------------
// AttributeMatrix

AttributeMatrix::AttributeMatrix(std::size_t n_nodes, std::size_t n_attrs)
    : AttributeMatrix(n_nodes, n_attrs, {}) {}

AttributeMatrix::AttributeMatrix(std::size_t n_nodes, std::size_t n_attrs,
                                 std::vector<NodePair> active)
    : n_nodes_(n_nodes), n_attrs_(n_attrs) {
  for (const auto& p : active) {
    if (p.row >= n_nodes || p.col >= n_attrs) {
      throw DataError("attribute entry out of range (" + std::to_string(p.row) + ", " +
                      std::to_string(p.col) + ") for a " + std::to_string(n_nodes) +
                      "x" + std::to_string(n_attrs) + " matrix");
    }
  }
  std::sort(active.begin(), active.end());
  active.erase(std::unique(active.begin(), active.end()), active.end());

  row_offsets_.assign(n_nodes + 1, 0);
  col_offsets_.assign(n_attrs + 1, 0);
  for (const auto& p : active) {
    ++row_offsets_[p.row + 1];
    ++col_offsets_[p.col + 1];
  }
  std::partial_sum(row_offsets_.begin(), row_offsets_.end(), row_offsets_.begin());
  std::partial_sum(col_offsets_.begin(), col_offsets_.end(), col_offsets_.begin());

  row_ids_.resize(active.size());
  col_ids_.resize(active.size());
  auto col_fill = col_offsets_;
  for (std::size_t n = 0; n < active.size(); ++n) {
    row_ids_[n] = active[n].col;
    col_ids_[col_fill[active[n].col]++] = active[n].row;
  }
}

bool AttributeMatrix::active(std::size_t node, std::size_t attr) const {
  const auto attrs = attributes_of(node);
  return std::binary_search(attrs.begin(), attrs.end(), static_cast<NodeId>(attr));
}

std::vector<NodePair> AttributeMatrix::pairs() const {
  std::vector<NodePair> out;
  out.reserve(num_nonzeros());
  for (std::size_t i = 0; i < n_nodes_; ++i) {
    for (NodeId l : attributes_of(i)) out.push_back({static_cast<NodeId>(i), l});
  }
  return out;
}

// ---------------------------------------------------------------------------
// Text formats

namespace {

struct PairFile {
  std::optional<std::size_t> header_rows;
  std::optional<std::size_t> header_cols;
  std::vector<std::pair<NodePair, std::size_t>> pairs;  // with line numbers
};

PairFile read_pair_file(const std::filesystem::path& path) {
  PairFile file;
  for (const auto& line : read_data_lines(path)) {
    std::string_view text = line.text;
    if (text.front() == '%') {
      auto fields = split_fields(text.substr(1));
      if (fields.empty() || fields.size() > 2) {
        throw DataError("malformed header, expected '%N' or '%N L'", line.number);
      }
      file.header_rows = parse_index(fields[0], line.number);
      if (fields.size() == 2) file.header_cols = parse_index(fields[1], line.number);
      continue;
    }
    const auto fields = split_fields(text);
    if (fields.size() != 2) {
      throw DataError("expected two whitespace-separated ids", line.number);
    }
    const auto a = parse_index(fields[0], line.number);
    const auto b = parse_index(fields[1], line.number);
    if (a > 0xffffffffULL || b > 0xffffffffULL) {
      throw DataError("id exceeds 32-bit range", line.number);
    }
    file.pairs.push_back({{static_cast<NodeId>(a), static_cast<NodeId>(b)}, line.number});
  }
  return file;
}

std::size_t resolve_extent(std::optional<std::size_t> given,
                           std::optional<std::size_t> header, std::size_t max_seen_plus_one) {
  if (given) return *given;
  if (header) return *header;
  return max_seen_plus_one;
}

}  // namespace

SparseBinaryMatrix load_edge_list(const std::filesystem::path& path,
                                  Directedness directedness,
                                  std::optional<std::size_t> n_nodes, LoadStats* stats) {
  const auto file = read_pair_file(path);
  std::size_t max_plus_one = 0;
  for (const auto& [p, line] : file.pairs) {
    max_plus_one = std::max<std::size_t>({max_plus_one, p.row + 1ULL, p.col + 1ULL});
  }
  const std::size_t n = resolve_extent(n_nodes, file.header_rows, max_plus_one);
  std::vector<NodePair> pairs;
  pairs.reserve(file.pairs.size());
  for (const auto& [p, line] : file.pairs) {
    if (p.row >= n || p.col >= n) {
      throw DataError("node id " + std::to_string(std::max(p.row, p.col)) +
                          " out of range for " + std::to_string(n) + " nodes",
                      line);
    }
    pairs.push_back(p);
  }
  SparseBinaryMatrix matrix(n, directedness, std::move(pairs));
  if (stats != nullptr) {
    stats->lines = file.pairs.size();
    stats->self_loops = matrix.dropped_self_loops();
    stats->duplicates = matrix.dropped_duplicates();
  }
  return matrix;
}

void write_edge_list(const std::filesystem::path& path, const SparseBinaryMatrix& matrix) {
  std::ostringstream out;
  out << "# " << (matrix.directed() ? "directed" : "undirected") << " edge list\n";
  out << '%' << matrix.n_nodes() << '\n';
  for (const auto& e : matrix.entries()) out << e.row << '\t' << e.col << '\n';
  write_file_atomic(path, out.str());
}

AttributeMatrix load_attributes(const std::filesystem::path& path,
                                std::optional<std::size_t> n_nodes,
                                std::optional<std::size_t> n_attrs) {
  const auto file = read_pair_file(path);
  std::size_t max_node = 0;
  std::size_t max_attr = 0;
  for (const auto& [p, line] : file.pairs) {
    max_node = std::max<std::size_t>(max_node, p.row + 1ULL);
    max_attr = std::max<std::size_t>(max_attr, p.col + 1ULL);
  }
  const std::size_t n = resolve_extent(n_nodes, file.header_rows, max_node);
  const std::size_t l = resolve_extent(n_attrs, file.header_cols, max_attr);
  std::vector<NodePair> pairs;
  pairs.reserve(file.pairs.size());
  for (const auto& [p, line] : file.pairs) {
    if (p.row >= n) {
      throw DataError("node id " + std::to_string(p.row) + " out of range for " +
                          std::to_string(n) + " nodes",
                      line);
    }
    if (p.col >= l) {
      throw DataError("attribute id " + std::to_string(p.col) + " out of range for " +
                          std::to_string(l) + " attributes",
                      line);
    }
    pairs.push_back(p);
  }
  return AttributeMatrix(n, l, std::move(pairs));
}

void write_attributes(const std::filesystem::path& path, const AttributeMatrix& matrix) {
  std::ostringstream out;
  out << "# node_id attr_id\n";
  out << '%' << matrix.n_nodes() << ' ' << matrix.n_attrs() << '\n';
  for (const auto& p : matrix.pairs()) out << p.row << '\t' << p.col << '\n';
  write_file_atomic(path, out.str());
}

AttributeMatrix load_hierarchy(const std::filesystem::path& path, std::size_t n_first_level,
                               std::optional<std::size_t> n_parents) {
  const auto file = read_pair_file(path);
  std::size_t max_parent = 0;
  for (const auto& [p, line] : file.pairs) {
    if (p.row >= n_first_level) {
      throw DataError("hierarchy references unknown attribute " + std::to_string(p.row) +
                          " (have " + std::to_string(n_first_level) + ")",
                      line);
    }
    max_parent = std::max<std::size_t>(max_parent, p.col + 1ULL);
  }
  const std::size_t m = resolve_extent(n_parents, file.header_cols, max_parent);
  std::vector<NodePair> pairs;
  for (const auto& [p, line] : file.pairs) {
    if (p.col >= m) {
      throw DataError("parent attribute id " + std::to_string(p.col) + " out of range",
                      line);
    }
    pairs.push_back(p);
  }
  return AttributeMatrix(n_first_level, m, std::move(pairs));
}

void write_hierarchy(const std::filesystem::path& path, const AttributeMatrix& hierarchy) {
  std::ostringstream out;
  out << "# attr_id parent_attr_id\n";
  out << '%' << hierarchy.n_nodes() << ' ' << hierarchy.n_attrs() << '\n';
  for (const auto& p : hierarchy.pairs()) out << p.row << '\t' << p.col << '\n';
  write_file_atomic(path, out.str());
}

std::vector<std::string> load_label_map(const std::filesystem::path& path) {
  std::vector<std::string> labels;
  for (const auto& line : read_data_lines(path)) {
    const auto fields = split_fields(line.text);
    if (fields.size() < 2) throw DataError("expected 'id label'", line.number);
    const auto id = parse_index(fields[0], line.number);
    if (id >= labels.size()) labels.resize(id + 1);
    const auto start = line.text.find(fields[1]);
    labels[id] = line.text.substr(start);
  }
  return labels;
}

// ---------------------------------------------------------------------------
// Categorical encoding

CategoricalEncoding encode_categorical(const CategoricalTable& table) {
  CategoricalEncoding result;
  const std::size_t n_nodes = table.values.size();
  const std::size_t n_fields = table.fields.size();

  // Column ids per field, assigned in order of first appearance.
  std::vector<std::vector<std::string>> levels(n_fields);
  std::vector<std::size_t> first_column(n_fields, 0);
  for (std::size_t f = 0; f < n_fields; ++f) {
    for (std::size_t i = 0; i < n_nodes; ++i) {
      if (table.values[i].size() != n_fields) {
        throw DataError("node " + std::to_string(i) + " has " +
                        std::to_string(table.values[i].size()) + " values, expected " +
                        std::to_string(n_fields));
      }
      const auto& v = table.values[i][f];
      if (v && std::find(levels[f].begin(), levels[f].end(), *v) == levels[f].end()) {
        levels[f].push_back(*v);
      }
    }
  }
  std::size_t n_columns = 0;
  for (std::size_t f = 0; f < n_fields; ++f) {
    first_column[f] = n_columns;
    for (const auto& level : levels[f]) {
      result.column_names.push_back(table.fields[f] + "=" + level);
    }
    n_columns += levels[f].size();
  }

  std::vector<NodePair> active;
  for (std::size_t i = 0; i < n_nodes; ++i) {
    for (std::size_t f = 0; f < n_fields; ++f) {
      const auto& v = table.values[i][f];
      if (!v) {
        result.missing.emplace_back(i, f);
        continue;
      }
      const auto pos = std::find(levels[f].begin(), levels[f].end(), *v) - levels[f].begin();
      active.push_back({static_cast<NodeId>(i),
                        static_cast<NodeId>(first_column[f] + static_cast<std::size_t>(pos))});
    }
  }
  result.matrix = AttributeMatrix(n_nodes, n_columns, std::move(active));
  return result;
}

// ---------------------------------------------------------------------------
// Splits

SparseBinaryMatrix EvalSet::train_links() const {
  std::vector<NodePair> pairs;
  for (const auto& e : train) {
    if (e.y == 1) pairs.push_back({e.i, e.j});
  }
  return SparseBinaryMatrix(n_nodes, directedness, std::move(pairs));
}

std::size_t EvalSet::train_positives() const {
  return static_cast<std::size_t>(
      std::count_if(train.begin(), train.end(), [](const auto& e) { return e.y == 1; }));
}

std::size_t EvalSet::test_positives() const {
  return static_cast<std::size_t>(
      std::count_if(test.begin(), test.end(), [](const auto& e) { return e.y == 1; }));
}

namespace {

class PairUniverse {
 public:
  PairUniverse(std::size_t n, bool directed) : n_(n), directed_(directed) {}

  std::size_t size() const { return directed_ ? n_ * (n_ - 1) : n_ * (n_ - 1) / 2; }
  std::uint64_t key(NodeId i, NodeId j) const {
    return static_cast<std::uint64_t>(i) * n_ + j;
  }

  template <typename Fn>
  void for_each(Fn&& fn) const {
    for (NodeId i = 0; i < n_; ++i) {
      for (NodeId j = directed_ ? 0 : i + 1; j < n_; ++j) {
        if (i != j) fn(i, j);
      }
    }
  }

  NodePair random_pair(RngStream& rng, std::span<const NodeId> pool) const {
    const auto pick = [&] {
      return pool[static_cast<std::size_t>(rng.uniform() * static_cast<double>(pool.size())) %
                  pool.size()];
    };
    for (;;) {
      NodeId i = pick();
      NodeId j = pick();
      if (i == j) continue;
      if (!directed_ && i > j) std::swap(i, j);
      return {i, j};
    }
  }

 private:
  std::size_t n_;
  bool directed_;
};

// Draws `count` distinct non-link pairs accepted by `region`, avoiding
// `taken`. Falls back to enumeration when the feasible set is small.
template <typename Region>
std::vector<LabeledPair> sample_negatives(const SparseBinaryMatrix& network,
                                          const PairUniverse& universe,
                                          std::span<const NodeId> pool,
                                          std::size_t feasible, std::size_t count,
                                          Region&& region,
                                          std::unordered_set<std::uint64_t>& taken,
                                          RngStream& rng) {
  std::vector<LabeledPair> out;
  if (count == 0) return out;
  if (count * 3 > feasible) {
    std::vector<NodePair> candidates;
    universe.for_each([&](NodeId i, NodeId j) {
      if (region(i, j) && !network.contains(i, j) && !taken.contains(universe.key(i, j))) {
        candidates.push_back({i, j});
      }
    });
    // Partial Fisher-Yates.
    const std::size_t take = std::min(count, candidates.size());
    for (std::size_t n = 0; n < take; ++n) {
      const auto r = n + static_cast<std::size_t>(rng.uniform() *
                                                  static_cast<double>(candidates.size() - n));
      std::swap(candidates[n], candidates[std::min(r, candidates.size() - 1)]);
      taken.insert(universe.key(candidates[n].row, candidates[n].col));
      out.push_back({candidates[n].row, candidates[n].col, 0});
    }
    std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) {
      return std::tie(a.i, a.j) < std::tie(b.i, b.j);
    });
    return out;
  }
  while (out.size() < count) {
    const auto p = universe.random_pair(rng, pool);
    if (!region(p.row, p.col) || network.contains(p.row, p.col)) continue;
    if (!taken.insert(universe.key(p.row, p.col)).second) continue;
    out.push_back({p.row, p.col, 0});
  }
  return out;
}

}  // namespace

EvalSet make_split(const SparseBinaryMatrix& network, const SplitSpec& spec) {
  if (!(spec.train_fraction > 0.0 && spec.train_fraction <= 1.0)) {
    throw ConfigError("train_fraction must lie in (0, 1]");
  }
  if (network.num_entries() == 0) throw DataError("cannot split an empty network");

  const std::size_t n = network.n_nodes();
  const PairUniverse universe(n, network.directed());
  RngStream rng(spec.seed, 0x5b11);

  EvalSet set;
  set.n_nodes = n;
  set.directedness = network.directedness();

  std::vector<NodeId> all_nodes(n);
  std::iota(all_nodes.begin(), all_nodes.end(), NodeId{0});
  std::vector<char> in_train_nodes(n, 1);
  std::vector<NodeId> train_nodes = all_nodes;

  if (spec.mode == SplitMode::by_links) {
    for (const auto& e : network.entries()) {
      auto& side = rng.uniform() <= spec.train_fraction ? set.train : set.test;
      side.push_back({e.row, e.col, 1});
    }
  } else {
    const auto keep = static_cast<std::size_t>(
        std::ceil(spec.train_fraction * static_cast<double>(n) - 1e-9));
    std::vector<NodeId> order = all_nodes;
    for (std::size_t a = 0; a < keep && a < n; ++a) {
      const auto r = a + static_cast<std::size_t>(rng.uniform() * static_cast<double>(n - a));
      std::swap(order[a], order[std::min(r, n - 1)]);
    }
    train_nodes.assign(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(keep));
    std::sort(train_nodes.begin(), train_nodes.end());
    std::fill(in_train_nodes.begin(), in_train_nodes.end(), 0);
    for (NodeId v : train_nodes) in_train_nodes[v] = 1;
    for (const auto& e : network.entries()) {
      const bool inside = in_train_nodes[e.row] && in_train_nodes[e.col];
      (inside ? set.train : set.test).push_back({e.row, e.col, 1});
    }
  }
  if (set.train.empty()) {
    throw DataError("training fraction " + std::to_string(spec.train_fraction) +
                    " leaves no positive link in the training set");
  }

  const auto in_train_region = [&](NodeId i, NodeId j) {
    return spec.mode == SplitMode::by_links || (in_train_nodes[i] && in_train_nodes[j]);
  };

  if (spec.all_negatives) {
    if (universe.size() > kMaxAllNegativesPairs) {
      throw ConfigError("all_negatives requires at most " +
                        std::to_string(kMaxAllNegativesPairs) + " candidate pairs");
    }
    universe.for_each([&](NodeId i, NodeId j) {
      if (network.contains(i, j)) return;
      bool train_side = false;
      if (spec.mode == SplitMode::by_links) {
        train_side = rng.uniform() <= spec.train_fraction;
      } else {
        train_side = in_train_region(i, j);
      }
      (train_side ? set.train : set.test).push_back({i, j, 0});
    });
    return set;
  }

  std::unordered_set<std::uint64_t> taken;
  const std::size_t train_pos = set.train.size();
  const std::size_t test_pos = set.test.size();
  const std::size_t links = network.num_entries();

  std::size_t train_feasible = universe.size() - links;
  std::size_t test_feasible = universe.size() - links;
  if (spec.mode == SplitMode::by_nodes) {
    const std::size_t m = train_nodes.size();
    const std::size_t region = network.directed() ? m * (m - 1) : m * (m - 1) / 2;
    train_feasible = region - train_pos;
    test_feasible = universe.size() - region - test_pos;
  }
  auto train_neg = sample_negatives(network, universe, train_nodes, train_feasible,
                                    train_pos, in_train_region, taken, rng);
  auto test_neg = sample_negatives(
      network, universe, all_nodes, test_feasible, test_pos,
      [&](NodeId i, NodeId j) {
        return spec.mode == SplitMode::by_links || !in_train_region(i, j);
      },
      taken, rng);
  set.train.insert(set.train.end(), train_neg.begin(), train_neg.end());
  set.test.insert(set.test.end(), test_neg.begin(), test_neg.end());
  return set;
}

void write_manifest(const std::filesystem::path& path, const EvalSet& set) {
  std::ostringstream out;
  out << "# i j y fold (" << (set.directedness == Directedness::directed ? "directed" : "undirected")
      << ")\n";
  out << '%' << set.n_nodes << '\n';
  for (const auto& e : set.train) out << e.i << '\t' << e.j << '\t' << e.y << "\ttrain\n";
  for (const auto& e : set.test) out << e.i << '\t' << e.j << '\t' << e.y << "\ttest\n";
  write_file_atomic(path, out.str());
}

EvalSet load_manifest(const std::filesystem::path& path, std::size_t n_nodes,
                      Directedness directedness) {
  EvalSet set;
  set.n_nodes = n_nodes;
  set.directedness = directedness;
  std::unordered_set<std::uint64_t> seen;
  for (const auto& line : read_data_lines(path)) {
    if (line.text.front() == '%') continue;
    const auto fields = split_fields(line.text);
    if (fields.size() != 4) throw DataError("expected 'i j y fold'", line.number);
    auto i = static_cast<NodeId>(parse_index(fields[0], line.number));
    auto j = static_cast<NodeId>(parse_index(fields[1], line.number));
    const auto y = parse_index(fields[2], line.number);
    if (i >= n_nodes || j >= n_nodes) throw DataError("node id out of range", line.number);
    if (i == j) throw DataError("self pair in manifest", line.number);
    if (y > 1) throw DataError("label must be 0 or 1", line.number);
    if (directedness == Directedness::undirected && i > j) std::swap(i, j);
    if (!seen.insert(static_cast<std::uint64_t>(i) * n_nodes + j).second) {
      throw DataError("pair listed twice", line.number);
    }
    const LabeledPair pair{i, j, static_cast<int>(y)};
    if (fields[3] == "train") {
      set.train.push_back(pair);
    } else if (fields[3] == "test") {
      set.test.push_back(pair);
    } else {
      throw DataError("fold must be 'train' or 'test'", line.number);
    }
  }
  return set;
}

}  // namespace narm
