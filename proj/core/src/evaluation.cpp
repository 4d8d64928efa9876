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

#include "narm/evaluation.hpp"

#include <algorithm>
#include <chrono>
#include <numeric>

#include "narm/errors.hpp"

namespace narm {
namespace {

std::vector<std::size_t> order_by_score(std::span<const double> scores) {
  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });
  return order;
}

void check_inputs(std::span<const double> scores, std::span<const int> labels) {
  NARM_EXPECTS(scores.size() == labels.size(), "scores and labels differ in length");
  for (int y : labels) NARM_EXPECTS(y == 0 || y == 1, "labels must be 0 or 1");
}

}  // namespace

PredictionAccumulator::PredictionAccumulator(std::vector<NodePair> pairs)
    : pairs_(std::move(pairs)), sums_(pairs_.size(), 0.0) {}

void PredictionAccumulator::accumulate(const Sampler& sampler) {
  for (std::size_t n = 0; n < pairs_.size(); ++n) {
    sums_[n] += sampler.link_probability(pairs_[n].row, pairs_[n].col);
  }
  ++samples_;
}

void PredictionAccumulator::add(std::span<const double> probabilities) {
  NARM_EXPECTS(probabilities.size() == pairs_.size(), "one probability per pair expected");
  for (std::size_t n = 0; n < pairs_.size(); ++n) sums_[n] += probabilities[n];
  ++samples_;
}

std::vector<double> PredictionAccumulator::mean() const {
  NARM_EXPECTS(samples_ > 0, "no samples accumulated");
  std::vector<double> out(sums_.size());
  const double n = static_cast<double>(samples_);
  for (std::size_t k = 0; k < out.size(); ++k) out[k] = std::clamp(sums_[k] / n, 0.0, 1.0);
  return out;
}

double auc_roc(std::span<const double> scores, std::span<const int> labels) {
  check_inputs(scores, labels);
  const auto positives = static_cast<double>(std::count(labels.begin(), labels.end(), 1));
  const double negatives = static_cast<double>(labels.size()) - positives;
  NARM_EXPECTS(positives > 0 && negatives > 0, "AUC-ROC needs both positive and negative labels");

  // Walk from the lowest score up; each tie group beats every negative seen
  // below it and splits the negatives inside the group.
  auto order = order_by_score(scores);
  std::reverse(order.begin(), order.end());
  double wins = 0.0;
  double negatives_below = 0.0;
  for (std::size_t a = 0; a < order.size();) {
    std::size_t b = a;
    double group_pos = 0.0;
    double group_neg = 0.0;
    while (b < order.size() && scores[order[b]] == scores[order[a]]) {
      (labels[order[b]] == 1 ? group_pos : group_neg) += 1.0;
      ++b;
    }
    wins += group_pos * (negatives_below + 0.5 * group_neg);
    negatives_below += group_neg;
    a = b;
  }
  return wins / (positives * negatives);
}

double auc_pr(std::span<const double> scores, std::span<const int> labels) {
  check_inputs(scores, labels);
  const auto positives = static_cast<double>(std::count(labels.begin(), labels.end(), 1));
  NARM_EXPECTS(positives > 0, "AUC-PR needs at least one positive label");

  const auto order = order_by_score(scores);
  double true_pos = 0.0;
  double seen = 0.0;
  double area = 0.0;
  for (std::size_t a = 0; a < order.size();) {
    std::size_t b = a;
    double gained = 0.0;
    while (b < order.size() && scores[order[b]] == scores[order[a]]) {
      gained += labels[order[b]] == 1 ? 1.0 : 0.0;
      ++b;
    }
    true_pos += gained;
    seen += static_cast<double>(b - a);
    area += (gained / positives) * (true_pos / seen);
    a = b;
  }
  return area;
}

McmcSchedule default_schedule(ModelKind kind) {
  if (kind == ModelKind::sym) return {3000, 1500};
  return {1500, 1000};
}

RunResult evaluate_run(const ModelConfig& config, const EvalSet& set,
                       const AttributeMatrix& attributes, const AttributeMatrix* parents,
                       const McmcSchedule& schedule, std::uint64_t seed,
                       std::size_t trace_every) {
  NARM_EXPECTS(schedule.burn_in < schedule.sweeps, "burn-in must be shorter than the run");
  NARM_EXPECTS(!set.test.empty(), "empty test set");

  const auto links = set.train_links();
  Sampler sampler(config, links, attributes, parents, seed);

  std::vector<NodePair> pairs;
  RunResult result;
  pairs.reserve(set.test.size());
  for (const auto& p : set.test) {
    pairs.push_back({p.i, p.j});
    result.labels.push_back(p.y);
  }
  sampler.hold_out(pairs);
  PredictionAccumulator acc(std::move(pairs));

  for (std::size_t s = 1; s <= schedule.sweeps; ++s) {
    SweepStats stats;
    sampler.sweep(&stats);
    result.stats.pairs_touched += stats.pairs_touched;
    result.stats.rate_floor_hits += stats.rate_floor_hits;
    for (std::size_t p = 0; p < kNumPhases; ++p) result.stats.seconds[p] += stats.seconds[p];
    if (s > schedule.burn_in) acc.accumulate(sampler);
    if (trace_every != 0 && s % trace_every == 0) {
      result.trace.push_back(
          {s, sampler.log_likelihood(), sampler.block_mass(), stats.total_seconds()});
    }
  }
  result.scores = acc.mean();
  result.auc_roc = auc_roc(result.scores, result.labels);
  result.auc_pr = auc_pr(result.scores, result.labels);
  return result;
}

}  // namespace narm
