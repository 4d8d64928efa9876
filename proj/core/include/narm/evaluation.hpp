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

// Link-prediction scoring: posterior-averaged probabilities over retained
// sweeps, AUC-ROC and AUC-PR.

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "narm/data.hpp"
#include "narm/model.hpp"
#include "narm/sampler.hpp"

namespace narm {

/// Running mean of link probabilities for a fixed list of pairs.
class PredictionAccumulator {
 public:
  explicit PredictionAccumulator(std::vector<NodePair> pairs);

  void accumulate(const Sampler& sampler);
  /// Adds one sample of probabilities given in pair order.
  void add(std::span<const double> probabilities);

  std::size_t samples() const { return samples_; }
  const std::vector<NodePair>& pairs() const { return pairs_; }
  /// Throws ContractViolation before the first sample.
  std::vector<double> mean() const;

 private:
  std::vector<NodePair> pairs_;
  std::vector<double> sums_;
  std::size_t samples_ = 0;
};

/// Probability that a random positive outscores a random negative; ties
/// count one half. Throws ContractViolation unless both classes occur.
double auc_roc(std::span<const double> scores, std::span<const int> labels);

/// Average precision. Pairs are ranked by decreasing score and every distinct
/// score is one threshold; the precision reached at a threshold is held over
/// the recall gained there:
///
///     AP = sum_t (R_t - R_{t-1}) P_t.
///
/// Tied scores enter together. Throws ContractViolation without positives.
double auc_pr(std::span<const double> scores, std::span<const int> labels);

struct McmcSchedule {
  std::size_t sweeps = 0;
  std::size_t burn_in = 0;  // sweeps discarded before averaging
};

/// 3000 sweeps keeping the last 1500 (sym); 1500 keeping the last 500 (asym).
McmcSchedule default_schedule(ModelKind kind);

struct TraceRow {
  std::size_t sweep = 0;
  double log_likelihood = 0.0;
  double block_mass = 0.0;
  double seconds = 0.0;
};

struct RunResult {
  double auc_roc = 0.0;
  double auc_pr = 0.0;
  std::vector<double> scores;  // in test-pair order
  std::vector<int> labels;
  std::vector<TraceRow> trace;
  SweepStats stats;  // summed over all sweeps
};

/// Fits on the training links of `set`, averages test-pair probabilities
/// over the retained sweeps and scores them. A trace row is recorded every
/// `trace_every` sweeps (never when 0).
RunResult evaluate_run(const ModelConfig& config, const EvalSet& set,
                       const AttributeMatrix& attributes, const AttributeMatrix* parents,
                       const McmcSchedule& schedule, std::uint64_t seed,
                       std::size_t trace_every = 10);

}  // namespace narm
