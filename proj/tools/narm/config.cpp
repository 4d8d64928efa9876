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

#include "config.hpp"

#include <cstdio>
#include <map>

#include "CLI11.hpp"
#include "narm/errors.hpp"
#include "narm/io.hpp"

namespace narm::cli {
namespace {

void require_positive(double value, const char* field) {
  if (!(value > 0.0)) {
    throw ConfigError(std::string(field) + " must be positive, got " + format_real(value));
  }
}

}  // namespace

void register_run_options(CLI::App& app, RunConfig& c) {
  app.add_option("--model", c.model, "sym (undirected) or asym (directed)")
      ->check(CLI::IsMember({"sym", "asym"}));
  app.add_option("--edges", c.edges, "edge list file");
  app.add_option("--attributes", c.attributes, "node attribute file");
  app.add_option("--hierarchy", c.hierarchy, "attribute to parent-attribute file");
  app.add_option("--num-nodes", c.num_nodes, "node count when no file header gives it");

  app.add_option("--k-max", c.k_max, "number of latent factors");
  app.add_option("--mu0", c.mu0, "rate (and flat shape) of the attribute loading prior");
  app.add_option("--gamma0", c.gamma0, "sym: total mass of the factor weights r");
  app.add_option("--epsilon", c.epsilon, "sym: diagonal block scale; asym: mean of q");
  app.add_option("--c0", c.c0, "sym: rate of r; asym: concentration of q");
  app.add_option("--a0", c.a0, "sym: initial block rate; asym: Dirichlet concentration");
  app.add_option("--e0", c.e0, "gamma hyper-prior shape");
  app.add_option("--f0", c.f0, "gamma hyper-prior rate");

  app.add_option("--sweeps", c.sweeps, "total Gibbs sweeps");
  app.add_option("--burn-in", c.burn_in, "sweeps discarded before averaging");

  app.add_option("--split-mode", c.split_mode, "hold out links or nodes")->check(CLI::IsMember({"by_links", "by_nodes"}));
  app.add_option("--train-fraction", c.train_fraction, "share of links (or nodes) kept for training");
  app.add_flag("--all-negatives", c.all_negatives, "score every non-link in the test set");
  app.add_option("--seeds", c.seeds, "one fold per seed")->delimiter(',');

  app.add_flag("--attributes-enabled,!--no-attributes", c.attributes_enabled,
               "use the attribute prior (on by default)");
  app.add_flag("--hierarchy-enabled", c.hierarchy_enabled, "use the second attribute level");
  app.add_flag("--resample-hypers", c.resample_hypers, "also resample the scalar hyper-parameters");
  app.add_flag("--compat-crt-index", c.compat_crt_index,
               "table draws with g / (g + i) instead of g / (g + i - 1)");
  app.add_flag("--parallel", c.parallel, "multi-threaded count step");
  app.add_option("--threads", c.threads, "worker threads (0: all cores)");
  app.add_option("--shape-update", c.shape_update, "sym attribute loading update")
      ->check(CLI::IsMember({"corrected", "collapsed"}));

  app.add_option("--out", c.out, "output directory");
  app.add_option("--snapshot-every", c.snapshot_every, "fit: intermediate snapshot period (0: off)");
  app.add_option("--trace-every", c.trace_every, "trace row period in sweeps (0: off)");
}

ResolvedConfig resolve(const RunConfig& c) {
  ResolvedConfig r;
  r.model.kind = parse_model_kind(c.model);
  r.directedness =
      r.model.kind == ModelKind::sym ? Directedness::undirected : Directedness::directed;

  if (c.k_max < 1) throw ConfigError("k_max must be at least 1");
  r.model.n_factors = c.k_max;
  require_positive(c.mu0, "mu0");
  require_positive(c.gamma0, "gamma0");
  require_positive(c.c0, "c0");
  require_positive(c.a0, "a0");
  require_positive(c.e0, "e0");
  require_positive(c.f0, "f0");

  r.model.sym = SymHypers{c.gamma0, c.epsilon.value_or(1.0), c.c0, c.a0, c.e0, c.f0, c.mu0};
  r.model.asym = AsymHypers{c.a0, c.c0, c.epsilon.value_or(0.5), c.e0, c.f0, c.mu0};
  const double eps = r.model.kind == ModelKind::sym ? r.model.sym.epsilon : r.model.asym.epsilon;
  require_positive(eps, "epsilon");
  if (r.model.kind == ModelKind::asym && !(eps < 1.0)) {
    throw ConfigError("epsilon must lie in (0, 1) for the asym model");
  }

  auto& opt = r.model.options;
  opt.crt = c.compat_crt_index ? CrtVariant::shifted : CrtVariant::standard;
  if (c.shape_update == "corrected") {
    opt.shape_update = ShapeUpdate::corrected;
  } else if (c.shape_update == "collapsed") {
    opt.shape_update = ShapeUpdate::collapsed;
  } else {
    throw ConfigError("shape_update must be 'corrected' or 'collapsed'");
  }
  opt.resample_hypers = c.resample_hypers;
  opt.parallel = c.parallel;
  opt.threads = c.threads;

  r.schedule = default_schedule(r.model.kind);
  if (c.sweeps) r.schedule.sweeps = *c.sweeps;
  if (c.burn_in) {
    r.schedule.burn_in = *c.burn_in;
  } else if (c.sweeps) {
    r.schedule.burn_in = *c.sweeps / 2;
  }
  if (r.schedule.sweeps < 1) throw ConfigError("sweeps must be at least 1");
  if (r.schedule.burn_in >= r.schedule.sweeps) {
    throw ConfigError("burn_in must be smaller than sweeps");
  }

  if (c.split_mode == "by_links") {
    r.split.mode = SplitMode::by_links;
  } else if (c.split_mode == "by_nodes") {
    r.split.mode = SplitMode::by_nodes;
  } else {
    throw ConfigError("split_mode must be 'by_links' or 'by_nodes'");
  }
  if (!(c.train_fraction > 0.0 && c.train_fraction < 1.0)) {
    throw ConfigError("train_fraction must lie in (0, 1)");
  }
  r.split.train_fraction = c.train_fraction;
  r.split.all_negatives = c.all_negatives;
  if (c.seeds.empty()) throw ConfigError("seeds must list at least one seed");
  if (c.hierarchy_enabled && !c.attributes_enabled) {
    throw ConfigError("hierarchy_enabled requires attributes_enabled");
  }
  return r;
}

std::string canonical_text(const RunConfig& c) {
  const auto r = resolve(c);
  std::map<std::string, std::string> kv;
  kv["model"] = c.model;
  kv["edges"] = c.edges;
  kv["attributes"] = c.attributes_enabled ? c.attributes : "";
  kv["hierarchy"] = c.hierarchy_enabled ? c.hierarchy : "";
  kv["num_nodes"] = c.num_nodes ? std::to_string(*c.num_nodes) : "";
  kv["k_max"] = std::to_string(c.k_max);
  kv["mu0"] = format_real(c.mu0);
  kv["gamma0"] = format_real(c.gamma0);
  kv["epsilon"] = format_real(r.model.kind == ModelKind::sym ? r.model.sym.epsilon
                                                             : r.model.asym.epsilon);
  kv["c0"] = format_real(c.c0);
  kv["a0"] = format_real(c.a0);
  kv["e0"] = format_real(c.e0);
  kv["f0"] = format_real(c.f0);
  kv["sweeps"] = std::to_string(r.schedule.sweeps);
  kv["burn_in"] = std::to_string(r.schedule.burn_in);
  kv["split_mode"] = c.split_mode;
  kv["train_fraction"] = format_real(c.train_fraction);
  kv["all_negatives"] = c.all_negatives ? "true" : "false";
  std::string seeds;
  for (auto s : c.seeds) seeds += (seeds.empty() ? "" : ",") + std::to_string(s);
  kv["seeds"] = seeds;
  kv["attributes_enabled"] = c.attributes_enabled ? "true" : "false";
  kv["hierarchy_enabled"] = c.hierarchy_enabled ? "true" : "false";
  kv["resample_hypers"] = c.resample_hypers ? "true" : "false";
  kv["compat_crt_index"] = c.compat_crt_index ? "true" : "false";
  kv["shape_update"] = c.shape_update;
  // Thread count changes the random streams of the parallel count step.
  kv["parallel"] = c.parallel ? "true" : "false";
  kv["threads"] = std::to_string(c.threads);
  std::string out;
  for (const auto& [k, v] : kv) out += k + "=" + v + "\n";
  return out;
}

std::string config_hash(const RunConfig& c) {
  char buffer[17];
  std::snprintf(buffer, sizeof buffer, "%016llx",
                static_cast<unsigned long long>(fnv1a64(canonical_text(c))));
  return buffer;
}

Inputs load_inputs(const RunConfig& c, const ResolvedConfig& r) {
  if (c.edges.empty()) throw ConfigError("edges: no edge list given");
  if (c.attributes_enabled && c.attributes.empty()) {
    throw ConfigError("attributes: attributes are enabled but no file was given "
                      "(pass --no-attributes to fit without them)");
  }
  if (c.hierarchy_enabled && c.hierarchy.empty()) {
    throw ConfigError("hierarchy: hierarchy is enabled but no file was given");
  }
  auto network = load_edge_list(c.edges, r.directedness, c.num_nodes);
  const std::size_t n = network.n_nodes();
  AttributeMatrix attributes(n, 0);
  if (c.attributes_enabled) attributes = load_attributes(c.attributes, n);
  std::optional<AttributeMatrix> parents;
  if (c.hierarchy_enabled) parents = load_hierarchy(c.hierarchy, attributes.n_attrs());
  return {std::move(network), std::move(attributes), std::move(parents)};
}

}  // namespace narm::cli
