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

#include <span>

#include "tfn/data.hpp"
#include "tfn/error.hpp"
#include "tfn/rng.hpp"

namespace tfn::data {

std::vector<std::size_t> FoldPlan::fold_indices(std::size_t fold) const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < assignments.size(); ++i) {
    if (assignments[i] == fold) out.push_back(i);
  }
  return out;
}

std::vector<std::size_t> FoldPlan::complement_indices(std::size_t fold) const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < assignments.size(); ++i) {
    if (assignments[i] != fold) out.push_back(i);
  }
  return out;
}

FoldPlan stratified_kfold(const Dataset& ds, std::size_t k,
                          std::uint64_t seed) {
  if (k < 2) throw SplitError("stratified_kfold: k must be at least 2");
  std::vector<std::size_t> by_class[2];
  for (std::size_t i = 0; i < ds.records.size(); ++i) {
    by_class[ds.records[i].label == kFraud ? 1 : 0].push_back(i);
  }
  for (int c = 0; c < 2; ++c) {
    if (by_class[c].size() < k) {
      throw SplitError("stratified_kfold: class " + std::to_string(c) +
                       " has " + std::to_string(by_class[c].size()) +
                       " records, fewer than k = " + std::to_string(k));
    }
  }
  numkit::Rng rng(seed);
  FoldPlan plan{k, std::vector<std::size_t>(ds.records.size(), 0)};
  std::size_t next = 0;
  for (auto& members : by_class) {
    rng.shuffle(std::span<std::size_t>(members));
    for (std::size_t idx : members) {
      plan.assignments[idx] = next;
      next = (next + 1) % k;
    }
  }
  return plan;
}

}  // namespace tfn::data
