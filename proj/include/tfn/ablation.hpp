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

#include <cstdint>
#include <string>
#include <vector>

#include "tfn/train.hpp"

namespace tfn::eval {

struct AblationRow {
  model::Variant variant = model::Variant::kTFComplete;
  std::uint64_t seed = 0;  // training seed used for this variant
  train::CvResult cv;
};

struct AblationReport {
  std::size_t k = 0;
  std::uint64_t seed = 0;
  double threshold = kDefaultThreshold;
  std::string dataset;         // dataset provenance
  train::TrainConfig config;   // base config; per-row seeds differ
  std::vector<AblationRow> rows;  // always in variant table order

  const AblationRow* find(model::Variant v) const;

  // Aligned table, mean ± std in percent.
  std::string to_text() const;
  // One row per variant: variant,label,acc_mean,acc_std,...,f1_std.
  std::string to_csv() const;
  // Machine-readable document; byte-identical for identical inputs.
  std::string to_json() const;
};

// Training seed of one variant in an ablation keyed by base_seed.
std::uint64_t variant_seed(std::uint64_t base_seed, model::Variant v);

// Runs run_cv for every requested variant over the same fold plan. Throws
// ConfigurationError if `variants` is empty or repeats a variant.
AblationReport run_ablation(const data::Dataset& ds, const data::FoldPlan& plan,
                            const std::vector<model::Variant>& variants,
                            const train::TrainConfig& cfg,
                            const train::CvOptions& options = {});

// JSON document for a single cross-validated variant (cmd_train's report).
std::string cv_report_json(const train::CvResult& cv,
                           const train::TrainConfig& cfg,
                           const std::string& dataset);

}  // namespace tfn::eval
