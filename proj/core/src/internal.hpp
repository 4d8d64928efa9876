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

#include <cmath>
#include <cstddef>
#include <span>
#include <string>

#include "narm/errors.hpp"
#include "narm/matrix.hpp"

namespace narm::detail {

inline double log_gamma_density(double x, double shape, double rate) {
  return shape * std::log(rate) - std::lgamma(shape) + (shape - 1.0) * std::log(x) - rate * x;
}

// The same density evaluated from log x, for values stored below the floor.
inline double log_gamma_density_at_log(double log_x, double shape, double rate) {
  return shape * std::log(rate) - std::lgamma(shape) + (shape - 1.0) * log_x -
         rate * std::exp(log_x);
}

inline void check_finite_values(std::span<const double> values, const char* name,
                                std::size_t sweep) {
  double sum = 0.0;
  for (double v : values) sum += v;
  if (!std::isfinite(sum)) {
    throw NumericalError(std::string("non-finite value in ") + name + " after sweep " +
                         std::to_string(sweep));
  }
}

inline void mirror_upper(CountMatrix& m) {
  for (std::size_t a = 0; a < m.rows(); ++a) {
    for (std::size_t b = a + 1; b < m.cols(); ++b) m(b, a) = m(a, b);
  }
}

}  // namespace narm::detail
