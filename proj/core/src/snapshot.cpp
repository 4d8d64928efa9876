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

#include "narm/snapshot.hpp"

#include <string_view>

#include "narm/errors.hpp"
#include "narm/io.hpp"

namespace narm {
namespace {

constexpr std::string_view kMagic = "narm-snapshot";

RealMatrix row_block(std::span<const double> values) {
  RealMatrix m(1, values.size());
  for (std::size_t k = 0; k < values.size(); ++k) m(0, k) = values[k];
  return m;
}

void add_prior(Snapshot& snap, const AttributePriorState& prior) {
  snap.scalars["L"] = static_cast<double>(prior.num_attributes());
  snap.scalars["mu0"] = prior.mu0;
  snap.blocks["H"] = prior.H;
  snap.blocks["b"] = row_block(prior.b);
  if (prior.hierarchy) {
    snap.scalars["M"] = static_cast<double>(prior.hierarchy->delta.rows());
    snap.blocks["delta"] = prior.hierarchy->delta;
  } else {
    snap.scalars["M"] = 0.0;
  }
}

void append_block(std::string& out, const std::string& name, const RealMatrix& m) {
  out += "[" + name + "]\t" + std::to_string(m.rows()) + "\t" + std::to_string(m.cols()) + "\n";
  for (std::size_t r = 0; r < m.rows(); ++r) {
    for (std::size_t c = 0; c < m.cols(); ++c) {
      if (c != 0) out += '\t';
      out += format_real(m(r, c));
    }
    out += '\n';
  }
}

}  // namespace

const RealMatrix& Snapshot::block(const std::string& name) const {
  const auto it = blocks.find(name);
  if (it == blocks.end()) throw DataError("snapshot has no block '" + name + "'");
  return it->second;
}

double Snapshot::scalar(const std::string& name) const {
  const auto it = scalars.find(name);
  if (it == scalars.end()) throw DataError("snapshot has no field '" + name + "'");
  return it->second;
}

double Snapshot::link_probability(std::size_t i, std::size_t j) const {
  const auto& phi = block("phi");
  NARM_EXPECTS(i < phi.rows() && j < phi.rows(), "node id out of range");
  if (kind == ModelKind::sym) return sym_link_probability(phi, block("lambda"), i, j);
  return asym_link_probability(phi, block("theta"), i, j);
}

Snapshot make_snapshot(const SymState& st) {
  Snapshot snap;
  snap.kind = ModelKind::sym;
  snap.scalars["sweep"] = static_cast<double>(st.sweeps);
  snap.scalars["N"] = static_cast<double>(st.num_nodes());
  snap.scalars["K"] = static_cast<double>(st.num_factors());
  snap.scalars["gamma0"] = st.hypers.gamma0;
  snap.scalars["epsilon"] = st.hypers.epsilon;
  snap.scalars["c0"] = st.hypers.c0;
  snap.scalars["a0"] = st.hypers.a0;
  snap.blocks["phi"] = st.phi;
  snap.blocks["lambda"] = st.lambda;
  snap.blocks["r"] = row_block(st.r);
  snap.blocks["c"] = row_block(st.c);
  add_prior(snap, st.prior);
  return snap;
}

Snapshot make_snapshot(const AsymState& st) {
  Snapshot snap;
  snap.kind = ModelKind::asym;
  snap.scalars["sweep"] = static_cast<double>(st.sweeps);
  snap.scalars["N"] = static_cast<double>(st.num_nodes());
  snap.scalars["K"] = static_cast<double>(st.num_factors());
  snap.scalars["a0"] = st.hypers.a0;
  snap.scalars["c0"] = st.hypers.c0;
  snap.scalars["epsilon"] = st.hypers.epsilon;
  snap.blocks["phi"] = st.phi;
  snap.blocks["theta"] = st.theta;
  snap.blocks["q"] = row_block(st.q);
  add_prior(snap, st.prior);
  return snap;
}

Snapshot make_snapshot(const Sampler& sampler) {
  if (const auto* s = sampler.sym()) return make_snapshot(*s);
  return make_snapshot(*sampler.asym());
}

std::string format_snapshot(const Snapshot& snap) {
  std::string out;
  out += std::string(kMagic) + "\t1\n";
  out += "model\t" + std::string(to_string(snap.kind)) + "\n";
  for (const auto& [name, value] : snap.scalars) out += name + "\t" + format_real(value) + "\n";
  for (const auto& [name, m] : snap.blocks) append_block(out, name, m);
  return out;
}

void write_snapshot(const std::filesystem::path& path, const Snapshot& snapshot) {
  write_file_atomic(path, format_snapshot(snapshot));
}

Snapshot read_snapshot(const std::filesystem::path& path) {
  const auto lines = read_data_lines(path);
  if (lines.empty()) throw DataError("empty snapshot file");
  {
    const auto fields = split_fields(lines[0].text);
    if (fields.size() != 2 || fields[0] != kMagic) {
      throw DataError("not a snapshot file", lines[0].number);
    }
  }
  Snapshot snap;
  bool have_model = false;
  std::size_t n = 1;
  while (n < lines.size()) {
    const auto& line = lines[n];
    const auto fields = split_fields(line.text);
    if (fields.empty()) {
      ++n;
      continue;
    }
    if (fields[0].front() == '[') {
      if (fields.size() != 3 || fields[0].back() != ']') {
        throw DataError("malformed block header", line.number);
      }
      const std::string name(fields[0].substr(1, fields[0].size() - 2));
      const auto rows = parse_index(fields[1], line.number);
      const auto cols = parse_index(fields[2], line.number);
      RealMatrix m(rows, cols);
      for (std::size_t r = 0; r < rows; ++r) {
        if (n + 1 + r >= lines.size()) throw DataError("block '" + name + "' is truncated");
        const auto& row_line = lines[n + 1 + r];
        const auto values = split_fields(row_line.text);
        if (values.size() != cols) {
          throw DataError("expected " + std::to_string(cols) + " values", row_line.number);
        }
        for (std::size_t c = 0; c < cols; ++c) m(r, c) = parse_real(values[c], row_line.number);
      }
      snap.blocks[name] = std::move(m);
      n += 1 + rows;
      continue;
    }
    if (fields.size() != 2) throw DataError("expected 'name value'", line.number);
    if (fields[0] == "model") {
      try {
        snap.kind = parse_model_kind(fields[1]);
      } catch (const ConfigError& e) {
        throw DataError(e.what(), line.number);
      }
      have_model = true;
    } else {
      snap.scalars[std::string(fields[0])] = parse_real(fields[1], line.number);
    }
    ++n;
  }
  if (!have_model) throw DataError("snapshot does not name its model");
  snap.block("phi");
  snap.block(snap.kind == ModelKind::sym ? "lambda" : "theta");
  return snap;
}

void write_trace_csv(const std::filesystem::path& path, const std::vector<TraceRow>& rows) {
  std::string out = "sweep,log_likelihood,block_mass,seconds\n";
  for (const auto& row : rows) {
    out += std::to_string(row.sweep) + "," + format_real(row.log_likelihood) + "," +
           format_real(row.block_mass) + "," + format_real(row.seconds) + "\n";
  }
  write_file_atomic(path, out);
}

}  // namespace narm
