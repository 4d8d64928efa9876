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

#include "commands.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <iostream>
#include <numeric>
#include <set>

#include "CLI11.hpp"
#include "narm/errors.hpp"
#include "narm/io.hpp"
#include "narm/snapshot.hpp"
#include "narm/synthetic.hpp"

namespace narm::cli {
namespace {

using nlohmann::json;
namespace fs = std::filesystem;

void note(const std::string& message) { std::cerr << "narm: " << message << '\n'; }

fs::path prepare_out_dir(const std::string& dir) {
  fs::path path(dir);
  std::error_code ec;
  fs::create_directories(path, ec);
  if (ec) throw ConfigError("out: cannot create '" + dir + "': " + ec.message());
  return path;
}

std::string attribute_mode(const RunConfig& c) {
  if (!c.attributes_enabled) return "off";
  return c.hierarchy_enabled ? "hierarchy" : "flat";
}

std::string jsonl(const std::vector<json>& records) {
  std::string out;
  for (const auto& r : records) out += r.dump() + "\n";
  return out;
}

json phase_json(const std::array<double, kNumPhases>& seconds) {
  json j = json::object();
  for (std::size_t p = 0; p < kNumPhases; ++p) {
    j[std::string(to_string(static_cast<Phase>(p)))] = seconds[p];
  }
  return j;
}

double mean_of(const std::vector<double>& v) {
  return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

// Sample standard deviation; zero for a single fold.
double stddev_of(const std::vector<double>& v) {
  if (v.size() < 2) return 0.0;
  const double m = mean_of(v);
  double ss = 0.0;
  for (double x : v) ss += (x - m) * (x - m);
  return std::sqrt(ss / static_cast<double>(v.size() - 1));
}

double median_of(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 == 1 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

double loglog_slope(const std::vector<BenchPoint>& points, bool attr_phase) {
  std::vector<double> xs;
  std::vector<double> ys;
  for (const auto& p : points) {
    const double t = attr_phase
                         ? p.phase_seconds[static_cast<std::size_t>(Phase::attributes)]
                         : p.sweep_seconds;
    xs.push_back(std::log(static_cast<double>(p.size)));
    ys.push_back(std::log(std::max(t, 1e-12)));
  }
  const double mx = mean_of(xs);
  const double my = mean_of(ys);
  double sxy = 0.0;
  double sxx = 0.0;
  for (std::size_t n = 0; n < xs.size(); ++n) {
    sxy += (xs[n] - mx) * (ys[n] - my);
    sxx += (xs[n] - mx) * (xs[n] - mx);
  }
  return sxx > 0.0 ? sxy / sxx : 0.0;
}

SparseBinaryMatrix random_network(std::size_t n, std::size_t edges, Directedness dir,
                                  RngStream& rng) {
  const std::size_t universe = dir == Directedness::directed ? n * (n - 1) : n * (n - 1) / 2;
  NARM_EXPECTS(edges <= universe / 2, "too many edges for the node count");
  std::uniform_int_distribution<std::size_t> pick(0, n - 1);
  std::set<NodePair> chosen;
  while (chosen.size() < edges) {
    auto i = static_cast<NodeId>(pick(rng));
    auto j = static_cast<NodeId>(pick(rng));
    if (i == j) continue;
    if (dir == Directedness::undirected && j < i) std::swap(i, j);
    chosen.insert({i, j});
  }
  return SparseBinaryMatrix(n, dir, std::vector<NodePair>(chosen.begin(), chosen.end()));
}

AttributeMatrix random_attributes(std::size_t n, std::size_t attrs, std::size_t activity,
                                  RngStream& rng) {
  NARM_EXPECTS(activity <= n, "attribute activity exceeds the node count");
  std::vector<NodePair> active;
  std::vector<NodeId> nodes(n);
  std::iota(nodes.begin(), nodes.end(), 0);
  for (std::size_t l = 0; l < attrs; ++l) {
    // Partial Fisher-Yates: the first `activity` entries are a uniform subset.
    for (std::size_t s = 0; s < activity; ++s) {
      std::uniform_int_distribution<std::size_t> pick(s, n - 1);
      std::swap(nodes[s], nodes[pick(rng)]);
      active.push_back({nodes[s], static_cast<NodeId>(l)});
    }
  }
  return AttributeMatrix(n, attrs, std::move(active));
}

BenchPoint time_sweeps(const ModelConfig& model, const SparseBinaryMatrix& links,
                       const AttributeMatrix& F, std::size_t size, const BenchOptions& opt) {
  Sampler sampler(model, links, F, nullptr, 7);
  for (std::size_t s = 0; s < opt.warmup; ++s) sampler.sweep();
  std::vector<double> totals;
  std::array<std::vector<double>, kNumPhases> phases;
  for (std::size_t s = 0; s < opt.sweeps; ++s) {
    SweepStats stats;
    sampler.sweep(&stats);
    totals.push_back(stats.total_seconds());
    for (std::size_t p = 0; p < kNumPhases; ++p) phases[p].push_back(stats.seconds[p]);
  }
  BenchPoint point;
  point.size = size;
  point.sweep_seconds = median_of(totals);
  for (std::size_t p = 0; p < kNumPhases; ++p) point.phase_seconds[p] = median_of(phases[p]);
  return point;
}

}  // namespace

FitSummary cmd_fit(const RunConfig& c) {
  const auto r = resolve(c);
  const auto inputs = load_inputs(c, r);
  const auto dir = prepare_out_dir(c.out);
  write_file_atomic(dir / "config.txt",
                    canonical_text(c) + "config_hash=" + config_hash(c) + "\n");

  const std::uint64_t seed = c.seeds.front();
  Sampler sampler(r.model, inputs.network, inputs.attributes,
                  inputs.parents ? &*inputs.parents : nullptr, seed);
  std::vector<TraceRow> trace;
  const std::size_t total = r.schedule.sweeps;
  for (std::size_t s = 1; s <= total; ++s) {
    SweepStats stats;
    sampler.sweep(&stats);
    if (c.trace_every != 0 && s % c.trace_every == 0) {
      trace.push_back({s, sampler.log_likelihood(), sampler.block_mass(), stats.total_seconds()});
    }
    if (c.snapshot_every != 0 && s % c.snapshot_every == 0 && s != total) {
      write_snapshot(dir / "snapshot.tsv", make_snapshot(sampler));
    }
  }
  FitSummary summary;
  summary.sweeps = total;
  summary.log_likelihood = sampler.log_likelihood();
  summary.snapshot = dir / "snapshot.tsv";
  write_snapshot(summary.snapshot, make_snapshot(sampler));
  write_trace_csv(dir / "trace.csv", trace);
  note("fit finished after " + std::to_string(total) + " sweeps, training log-likelihood " +
       format_real(summary.log_likelihood));
  return summary;
}

std::vector<json> cmd_eval(const RunConfig& c) {
  const auto r = resolve(c);
  const auto inputs = load_inputs(c, r);
  const auto dir = prepare_out_dir(c.out);
  const std::string hash = config_hash(c);
  const AttributeMatrix* parents = inputs.parents ? &*inputs.parents : nullptr;

  std::vector<json> records;
  std::vector<json> timings;
  std::vector<double> rocs;
  std::vector<double> prs;
  for (std::size_t fold = 0; fold < c.seeds.size(); ++fold) {
    const std::uint64_t seed = c.seeds[fold];
    SplitSpec spec = r.split;
    spec.seed = seed;
    const EvalSet set = make_split(inputs.network, spec);
    write_manifest(dir / ("split_" + std::to_string(fold) + ".tsv"), set);

    const auto start = std::chrono::steady_clock::now();
    const RunResult result =
        evaluate_run(r.model, set, inputs.attributes, parents, r.schedule, seed, c.trace_every);
    const double wall =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    write_trace_csv(dir / ("trace_" + std::to_string(fold) + ".csv"), result.trace);

    rocs.push_back(result.auc_roc);
    prs.push_back(result.auc_pr);
    records.push_back({{"record", "fold"},
                       {"fold", fold},
                       {"seed", seed},
                       {"model", c.model},
                       {"attributes", attribute_mode(c)},
                       {"split_mode", c.split_mode},
                       {"train_fraction", c.train_fraction},
                       {"test_pairs", set.test.size()},
                       {"test_positives", set.test_positives()},
                       {"auc_roc", result.auc_roc},
                       {"auc_pr", result.auc_pr},
                       {"config_hash", hash}});
    timings.push_back({{"fold", fold},
                       {"seed", seed},
                       {"wall_seconds", wall},
                       {"phase_seconds", phase_json(result.stats.seconds)},
                       {"config_hash", hash}});
    note("fold " + std::to_string(fold) + " (seed " + std::to_string(seed) +
         "): AUC-ROC " + format_real(result.auc_roc) + ", AUC-PR " +
         format_real(result.auc_pr));
  }
  records.push_back({{"record", "aggregate"},
                     {"model", c.model},
                     {"attributes", attribute_mode(c)},
                     {"n_folds", c.seeds.size()},
                     {"auc_roc_mean", mean_of(rocs)},
                     {"auc_roc_std", stddev_of(rocs)},
                     {"auc_pr_mean", mean_of(prs)},
                     {"auc_pr_std", stddev_of(prs)},
                     {"config_hash", hash}});
  // Wall time lives in its own file so that reruns reproduce metrics.jsonl
  // byte for byte.
  write_file_atomic(dir / "metrics.jsonl", jsonl(records));
  write_file_atomic(dir / "metrics.timing.jsonl", jsonl(timings));
  return records;
}

void cmd_predict(const fs::path& snapshot_path, const fs::path& pairs_path,
                 const fs::path& out) {
  const Snapshot snapshot = read_snapshot(snapshot_path);
  const auto n = static_cast<std::size_t>(snapshot.scalar("N"));
  std::string text;
  for (const auto& line : read_data_lines(pairs_path)) {
    const auto fields = split_fields(line.text);
    if (fields.size() < 2) throw DataError("expected 'i j'", line.number);
    const auto i = parse_index(fields[0], line.number);
    const auto j = parse_index(fields[1], line.number);
    if (i >= n || j >= n) throw DataError("node id out of range", line.number);
    if (i == j) throw DataError("self pairs cannot be scored", line.number);
    text += std::to_string(i) + " " + std::to_string(j) + " " +
            format_real(snapshot.link_probability(i, j)) + "\n";
  }
  write_file_atomic(out, text);
}

void cmd_simulate(const RunConfig& c, const SimulateOptions& o) {
  const auto r = resolve(c);
  const auto dir = prepare_out_dir(c.out);
  const std::uint64_t seed = c.seeds.front();

  if (o.generator == "planted") {
    PlantedConfig pc;
    pc.n_nodes = o.nodes;
    pc.n_communities = o.communities;
    pc.directedness = r.directedness;
    pc.p_in = o.p_in;
    pc.p_out = o.p_out;
    pc.attrs_per_community = o.attrs_per_community;
    pc.attr_on = o.attr_on;
    pc.attr_noise = o.attr_noise;
    pc.seed = seed;
    const auto data = planted_partition(pc);
    write_edge_list(dir / "edges.txt", data.network);
    write_attributes(dir / "attributes.txt", data.attributes);
    std::string text;
    for (std::size_t i = 0; i < data.community.size(); ++i) {
      text += std::to_string(i) + " " + std::to_string(data.community[i]) + "\n";
    }
    write_file_atomic(dir / "communities.txt", text);
    return;
  }
  if (o.generator == "hierarchy") {
    HierarchicalConfig hc;
    hc.n_nodes = o.nodes;
    hc.n_communities = o.communities;
    hc.directedness = r.directedness;
    hc.p_in = o.p_in;
    hc.p_out = o.p_out;
    hc.seed = seed;
    const auto data = planted_hierarchy(hc);
    write_edge_list(dir / "edges.txt", data.network);
    write_attributes(dir / "attributes.txt", data.attributes);
    write_hierarchy(dir / "hierarchy.txt", data.parents);
    std::string text;
    for (std::size_t i = 0; i < data.community.size(); ++i) {
      text += std::to_string(i) + " " + std::to_string(data.community[i]) + "\n";
    }
    write_file_atomic(dir / "communities.txt", text);
    return;
  }
  if (o.generator != "model") {
    throw ConfigError("generator must be 'model', 'planted' or 'hierarchy'");
  }
  if (!(o.attr_density >= 0.0 && o.attr_density <= 1.0)) {
    throw ConfigError("attr_density must lie in [0, 1]");
  }

  RngStream rng(seed, 0x5117);
  std::vector<NodePair> active;
  for (std::size_t i = 0; i < o.nodes; ++i) {
    for (std::size_t l = 0; l < o.attrs; ++l) {
      if (rng.uniform() < o.attr_density) {
        active.push_back({static_cast<NodeId>(i), static_cast<NodeId>(l)});
      }
    }
  }
  const AttributeMatrix F(o.nodes, o.attrs, std::move(active));
  std::optional<AttributeMatrix> parents;
  if (o.parents > 0) {
    std::uniform_int_distribution<std::size_t> pick(0, o.parents - 1);
    std::vector<NodePair> edges;
    for (std::size_t l = 0; l < o.attrs; ++l) {
      edges.push_back({static_cast<NodeId>(l), static_cast<NodeId>(pick(rng))});
    }
    parents = AttributeMatrix(o.attrs, o.parents, std::move(edges));
  }
  const AttributeMatrix* pp = parents ? &*parents : nullptr;
  Snapshot truth;
  if (r.model.kind == ModelKind::sym) {
    auto sim = sym_simulate(o.nodes, r.model.n_factors, r.model.sym, F, pp, rng, r.model.options);
    write_edge_list(dir / "edges.txt", sim.network);
    truth = make_snapshot(sim.state);
  } else {
    auto sim =
        asym_simulate(o.nodes, r.model.n_factors, r.model.asym, F, pp, rng, r.model.options);
    write_edge_list(dir / "edges.txt", sim.network);
    truth = make_snapshot(sim.state);
  }
  write_attributes(dir / "attributes.txt", F);
  if (parents) write_hierarchy(dir / "hierarchy.txt", *parents);
  write_snapshot(dir / "truth.tsv", truth);
}

BenchReport run_bench(const RunConfig& c, const BenchOptions& o) {
  const auto r = resolve(c);
  RngStream rng(c.seeds.front(), 0xbe7c);
  BenchReport report;

  const auto base_attrs = random_attributes(o.nodes, o.base_attrs, o.attr_activity, rng);
  std::size_t edges = o.base_edges;
  for (std::size_t d = 0; d <= o.doublings; ++d, edges *= 2) {
    const auto links = random_network(o.nodes, edges, r.directedness, rng);
    report.edge_grid.push_back(time_sweeps(r.model, links, base_attrs, edges, o));
  }
  const auto base_links = random_network(o.nodes, o.base_edges, r.directedness, rng);
  std::size_t attrs = o.base_attrs;
  for (std::size_t d = 0; d <= o.doublings; ++d, attrs *= 2) {
    const auto F = random_attributes(o.nodes, attrs, o.attr_activity, rng);
    report.attr_grid.push_back(time_sweeps(r.model, base_links, F, attrs, o));
  }
  const auto attr_time = [](const BenchPoint& p) {
    return p.phase_seconds[static_cast<std::size_t>(Phase::attributes)];
  };
  for (std::size_t d = 1; d < report.edge_grid.size(); ++d) {
    report.edge_doubling_ratio =
        std::max(report.edge_doubling_ratio,
                 report.edge_grid[d].sweep_seconds / report.edge_grid[d - 1].sweep_seconds);
    report.attr_doubling_ratio =
        std::max(report.attr_doubling_ratio,
                 attr_time(report.attr_grid[d]) / attr_time(report.attr_grid[d - 1]));
  }
  report.edge_exponent = loglog_slope(report.edge_grid, false);
  report.attr_exponent = loglog_slope(report.attr_grid, true);
  return report;
}

json to_json(const BenchReport& report) {
  const auto grid = [](const std::vector<BenchPoint>& points) {
    json arr = json::array();
    for (const auto& p : points) {
      arr.push_back({{"size", p.size},
                     {"sweep_seconds", p.sweep_seconds},
                     {"phase_seconds", phase_json(p.phase_seconds)}});
    }
    return arr;
  };
  return {{"edge_grid", grid(report.edge_grid)},
          {"attr_grid", grid(report.attr_grid)},
          {"edge_doubling_ratio", report.edge_doubling_ratio},
          {"attr_doubling_ratio", report.attr_doubling_ratio},
          {"edge_exponent", report.edge_exponent},
          {"attr_exponent", report.attr_exponent}};
}

int run(int argc, const char* const* argv) {
  CLI::App app{"Attribute-informed Poisson-gamma network factorization"};
  app.require_subcommand(1);
  app.fallthrough();
  app.set_config("--config", "", "key=value configuration file");

  RunConfig config;
  register_run_options(app, config);

  auto* fit = app.add_subcommand("fit", "fit a model to a network");
  auto* eval = app.add_subcommand("eval", "split, fit and score link prediction per seed");
  auto* predict = app.add_subcommand("predict", "score node pairs from a snapshot");
  std::string snapshot_path;
  std::string pairs_path;
  std::string predict_out = "predictions.txt";
  predict->add_option("--snapshot", snapshot_path, "snapshot written by fit")->required();
  predict->add_option("--pairs", pairs_path, "node pairs to score, one per line")->required();
  predict->add_option("--predictions", predict_out, "output file");

  auto* simulate = app.add_subcommand("simulate", "write a synthetic dataset");
  SimulateOptions sim;
  simulate->add_option("--generator", sim.generator, "draw from the model or plant communities")
      ->check(CLI::IsMember({"model", "planted", "hierarchy"}));
  simulate->add_option("--nodes", sim.nodes, "node count");
  simulate->add_option("--attrs", sim.attrs, "model generator: attribute columns");
  simulate->add_option("--attr-density", sim.attr_density, "model generator: P(attribute on)");
  simulate->add_option("--parents", sim.parents, "model generator: second-level attributes");
  simulate->add_option("--communities", sim.communities, "planted generators: community count");
  simulate->add_option("--p-in", sim.p_in, "link probability inside a community");
  simulate->add_option("--p-out", sim.p_out, "link probability across communities");
  simulate->add_option("--attrs-per-community", sim.attrs_per_community,
                       "planted: attributes owned by each community");
  simulate->add_option("--attr-on", sim.attr_on, "planted: P(own attribute on)");
  simulate->add_option("--attr-noise", sim.attr_noise, "planted: P(foreign attribute on)");

  auto* bench = app.add_subcommand("bench", "per-sweep timing over scaling grids");
  BenchOptions bo;
  bench->add_option("--nodes", bo.nodes, "node count of the synthetic networks");
  bench->add_option("--factors", bo.factors, "latent factors");
  bench->add_option("--base-edges", bo.base_edges, "edge count at the first grid point");
  bench->add_option("--base-attrs", bo.base_attrs, "attribute count at the first grid point");
  bench->add_option("--attr-activity", bo.attr_activity, "nodes carrying each attribute");
  bench->add_option("--doublings", bo.doublings, "grid points after the first");
  bench->add_option("--bench-sweeps", bo.sweeps, "timed sweeps per grid point");
  bench->add_option("--bench-warmup", bo.warmup, "untimed sweeps before timing starts");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfig;
  }

  try {
    if (fit->parsed()) {
      cmd_fit(config);
    } else if (eval->parsed()) {
      for (const auto& record : cmd_eval(config)) std::cout << record.dump() << '\n';
    } else if (predict->parsed()) {
      cmd_predict(snapshot_path, pairs_path, predict_out);
    } else if (simulate->parsed()) {
      cmd_simulate(config, sim);
    } else if (bench->parsed()) {
      RunConfig bench_config = config;
      bench_config.k_max = bo.factors;
      std::cout << to_json(run_bench(bench_config, bo)).dump(2) << '\n';
    }
  } catch (const ConfigError& e) {
    std::cerr << "narm: configuration error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const DataError& e) {
    std::cerr << "narm: data error: " << e.what() << '\n';
    return kExitData;
  } catch (const NumericalError& e) {
    std::cerr << "narm: numerical failure: " << e.what() << '\n';
    return kExitNumerical;
  } catch (const ContractViolation& e) {
    std::cerr << "narm: invalid argument: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "narm: " << e.what() << '\n';
    return kExitFailure;
  }
  return kExitOk;
}

}  // namespace narm::cli
