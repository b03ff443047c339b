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
#include <filesystem>
#include <string>
#include <vector>

#include "tfn/tensor.hpp"

namespace tfn::data {

using numkit::Vector;

inline constexpr std::size_t kFeatureDim = 768;

enum Label : int { kLegit = 0, kFraud = 1 };

struct FeatureRecord {
  std::string id;
  Vector video;
  Vector audio;
  int label = kLegit;
};

struct Dataset {
  std::vector<FeatureRecord> records;
  std::string provenance;

  std::size_t size() const { return records.size(); }
  std::size_t count_label(int label) const;
  // Feature length shared by all records (0 when empty).
  std::size_t feature_dim() const;
};

// Throws InputError on duplicate ids, bad labels, length mismatches, or
// non-finite features. `expected_dim` of 0 accepts any common length.
void validate(const Dataset& ds, std::size_t expected_dim = kFeatureDim);

struct SynthConfig {
  std::size_t n_total = 820;
  std::size_t n_fraud = 356;
  double a = 0.8;  // unimodal video weight
  double b = 0.6;  // unimodal audio weight
  double c = 1.0;  // bimodal weight
  double sigma = 0.5;
  std::size_t d_sig = 16;
  double amplitude = 1.0;
  std::uint64_t seed = 0;
  std::size_t feature_dim = kFeatureDim;
};

// Throws ParameterError unless 0 < n_fraud < n_total, d_sig <= feature_dim
// and sigma >= 0.
void validate(const SynthConfig& cfg);

// Proposals allowed per requested record before generation gives up.
inline constexpr std::size_t kMaxAttemptsPerRecord = 1000;

// Planted-signal generator. Each proposal draws latent signs s_v, s_a and
// labels itself by a*s_v + b*s_a + c*s_v*s_a + noise > 0; proposals whose
// class quota is already full are rejected. Accepted records carry
// amplitude * s on the first d_sig coordinates plus unit Gaussian noise.
Dataset generate_synthetic(const SynthConfig& cfg);

// Best achievable accuracy on data from generate_synthetic given oracle
// access to the latent signs. `use_video`/`use_audio` restrict the oracle to
// one modality.
struct CeilingQuery {
  bool use_video = true;
  bool use_audio = true;
};

// Closed form over the four sign combinations with Gaussian label noise,
// reweighted to the quota class balance.
double bayes_ceiling_exact(const SynthConfig& cfg, CeilingQuery q = {});

// Monte-Carlo estimate of the same quantity from `draws` latent draws.
double bayes_ceiling_monte_carlo(const SynthConfig& cfg, std::size_t draws,
                                 std::uint64_t seed, CeilingQuery q = {});

// Monte-Carlo ceiling for the default configuration (10^6 draws, seed 2024),
// frozen so runs can report it without recomputing.
inline constexpr double kDefaultBayesCeiling = 0.906412;

struct FoldPlan {
  std::size_t k = 0;
  std::vector<std::size_t> assignments;  // fold index per record

  std::vector<std::size_t> fold_indices(std::size_t fold) const;
  std::vector<std::size_t> complement_indices(std::size_t fold) const;
};

// Shuffles each class with a seeded generator and deals the records to
// folds round-robin. The dealing position carries over from one class to
// the next (legit first), so fold sizes differ by at most one as well as
// per-class counts.
FoldPlan stratified_kfold(const Dataset& ds, std::size_t k, std::uint64_t seed);

enum class Format { kBinary, kJsonl };

Format parse_format(const std::string& name);

void save_dataset(const Dataset& ds, const std::filesystem::path& path,
                  Format format);
// Detects the format from the leading bytes.
Dataset load_dataset(const std::filesystem::path& path);

// Single JSONL line <-> record, shared with the inference front end.
std::string record_to_json(const FeatureRecord& r);
FeatureRecord record_from_json(const std::string& line,
                               std::size_t expected_dim = kFeatureDim);

}  // namespace tfn::data
