// Copyright 2026 The tfnfraud Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace tfn::numkit {

inline constexpr double kGradCheckStep = 1e-5;
// Largest acceptable relative error for a correct backward pass.
inline constexpr double kGradCheckTolerance = 1e-5;

using ScalarFn = std::function<double(std::span<const double>)>;
using GradientFn = std::function<std::vector<double>(std::span<const double>)>;

struct GradCheckResult {
  double max_rel_error = 0.0;
  std::size_t worst_index = 0;
};

// Compares the analytic gradient against central differences of `f`,
// coordinate by coordinate. The error of one coordinate is
//   |analytic - fd| / max(1, |analytic|, |fd|).
// Throws NumericError if f is non-finite at any probe.
GradCheckResult grad_check_detailed(const ScalarFn& f, const GradientFn& grad,
                                    std::span<const double> theta,
                                    double h = kGradCheckStep);

inline double grad_check(const ScalarFn& f, const GradientFn& grad,
                         std::span<const double> theta,
                         double h = kGradCheckStep) {
  return grad_check_detailed(f, grad, theta, h).max_rel_error;
}

}  // namespace tfn::numkit
