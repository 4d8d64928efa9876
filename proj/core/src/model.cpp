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

#include "narm/model.hpp"

#include <numeric>
#include <string>

#include "narm/errors.hpp"

namespace narm {

std::string_view to_string(ModelKind kind) {
  return kind == ModelKind::sym ? "sym" : "asym";
}

ModelKind parse_model_kind(std::string_view text) {
  if (text == "sym") return ModelKind::sym;
  if (text == "asym") return ModelKind::asym;
  throw ConfigError("model must be 'sym' or 'asym', got '" + std::string(text) + "'");
}

std::string_view to_string(Phase phase) {
  switch (phase) {
    case Phase::counts: return "counts";
    case Phase::tables: return "tables";
    case Phase::attributes: return "attributes";
    case Phase::loadings: return "loadings";
    case Phase::blocks: return "blocks";
    case Phase::weights: return "weights";
    case Phase::hypers: return "hypers";
    case Phase::kCount: break;
  }
  return "unknown";
}

double SweepStats::total_seconds() const {
  return std::accumulate(seconds.begin(), seconds.end(), 0.0);
}

double link_probability_from_rate(double rate) {
  if (rate <= 0.0) return 0.0;
  return -std::expm1(-rate);
}

}  // namespace narm
