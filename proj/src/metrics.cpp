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

#include "tfn/metrics.hpp"

#include <string>

#include "tfn/error.hpp"

namespace tfn::eval {

namespace {

double ratio(double num, double den, bool& degenerate) {
  if (den == 0.0) {
    degenerate = true;
    return 0.0;
  }
  return num / den;
}

}  // namespace

ConfusionMatrix confusion(std::span<const double> probs,
                          std::span<const int> labels, double threshold) {
  if (probs.size() != labels.size()) {
    throw DimensionError("confusion: " + std::to_string(probs.size()) +
                         " probabilities vs " + std::to_string(labels.size()) +
                         " labels");
  }
  if (!(threshold > 0.0 && threshold < 1.0)) {
    throw ParameterError("confusion: threshold must lie in (0, 1)");
  }
  ConfusionMatrix cm;
  for (std::size_t i = 0; i < probs.size(); ++i) {
    const bool predicted = probs[i] >= threshold;
    const bool actual = labels[i] == 1;
    if (predicted && actual) ++cm.tp;
    else if (predicted) ++cm.fp;
    else if (actual) ++cm.fn;
    else ++cm.tn;
  }
  return cm;
}

MetricsReport metrics(const ConfusionMatrix& cm, double threshold) {
  if (cm.total() == 0) {
    throw InputError("metrics: confusion matrix is empty");
  }
  MetricsReport r;
  r.cm = cm;
  r.threshold = threshold;
  const auto tp = static_cast<double>(cm.tp);
  r.accuracy = static_cast<double>(cm.tp + cm.tn) / static_cast<double>(cm.total());
  r.precision = ratio(tp, static_cast<double>(cm.tp + cm.fp), r.degenerate);
  r.recall = ratio(tp, static_cast<double>(cm.tp + cm.fn), r.degenerate);
  r.f1 = ratio(2.0 * r.precision * r.recall, r.precision + r.recall,
               r.degenerate);
  return r;
}

}  // namespace tfn::eval
