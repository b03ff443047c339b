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
#include <span>

namespace tfn::eval {

inline constexpr double kDefaultThreshold = 0.5;

// Fraud (label 1) is the positive class.
struct ConfusionMatrix {
  std::size_t tp = 0;
  std::size_t tn = 0;
  std::size_t fp = 0;
  std::size_t fn = 0;

  std::size_t total() const { return tp + tn + fp + fn; }
  friend bool operator==(const ConfusionMatrix&, const ConfusionMatrix&) = default;
};

struct MetricsReport {
  double accuracy = 0.0;
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  ConfusionMatrix cm;
  double threshold = kDefaultThreshold;
  // Set when some ratio had a zero denominator and was reported as 0.
  bool degenerate = false;
};

// Predicts fraud iff p >= threshold.
ConfusionMatrix confusion(std::span<const double> probs,
                          std::span<const int> labels,
                          double threshold = kDefaultThreshold);

// Throws InputError for an empty matrix.
MetricsReport metrics(const ConfusionMatrix& cm,
                      double threshold = kDefaultThreshold);

}  // namespace tfn::eval
