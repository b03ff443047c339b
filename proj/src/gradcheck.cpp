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

#include "tfn/gradcheck.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "tfn/error.hpp"

namespace tfn::numkit {

GradCheckResult grad_check_detailed(const ScalarFn& f, const GradientFn& grad,
                                    std::span<const double> theta, double h) {
  if (!(h > 0.0)) {
    throw ParameterError("grad_check: step must be positive");
  }
  const std::vector<double> analytic = grad(theta);
  if (analytic.size() != theta.size()) {
    throw DimensionError("grad_check: gradient has " +
                         std::to_string(analytic.size()) +
                         " entries for " + std::to_string(theta.size()) +
                         " parameters");
  }
  std::vector<double> probe(theta.begin(), theta.end());
  auto eval = [&](std::size_t i) {
    const double v = f(probe);
    if (!std::isfinite(v)) {
      throw NumericError("grad_check: non-finite function value probing "
                         "coordinate " + std::to_string(i));
    }
    return v;
  };

  GradCheckResult result;
  for (std::size_t i = 0; i < theta.size(); ++i) {
    probe[i] = theta[i] + h;
    const double up = eval(i);
    probe[i] = theta[i] - h;
    const double down = eval(i);
    probe[i] = theta[i];
    const double fd = (up - down) / (2.0 * h);
    const double a = analytic[i];
    const double err =
        std::abs(a - fd) / std::max({1.0, std::abs(a), std::abs(fd)});
    if (err > result.max_rel_error) {
      result.max_rel_error = err;
      result.worst_index = i;
    }
  }
  return result;
}

}  // namespace tfn::numkit
