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

#include <array>
#include <cmath>
#include <map>
#include <set>

#include "tfn/data.hpp"
#include "tfn/error.hpp"
#include "tfn/rng.hpp"

namespace tfn::data {

namespace {

double latent_score(const SynthConfig& cfg, int sv, int sa) {
  return cfg.a * sv + cfg.b * sa + cfg.c * sv * sa;
}

// P(label = 1 | s_v, s_a) before quota sampling.
double fraud_probability(const SynthConfig& cfg, int sv, int sa) {
  const double mu = latent_score(cfg, sv, sa);
  if (cfg.sigma == 0.0) return mu > 0.0 ? 1.0 : 0.0;
  return 0.5 * std::erfc(-mu / (cfg.sigma * std::sqrt(2.0)));
}

constexpr std::array<std::array<int, 2>, 4> kSigns = {
    {{-1, -1}, {-1, 1}, {1, -1}, {1, 1}}};

// joint[s][y]: natural probability (or frequency) of latent combination s
// with label y. Reweights to the quota class balance and returns the
// accuracy of the best decision per observable group.
double ceiling_from_joint(const SynthConfig& cfg,
                          const std::array<std::array<double, 2>, 4>& joint,
                          CeilingQuery q) {
  double p_class[2] = {0.0, 0.0};
  for (const auto& row : joint) {
    p_class[0] += row[0];
    p_class[1] += row[1];
  }
  if (p_class[0] <= 0.0 || p_class[1] <= 0.0) {
    throw GenerationError("generative process never produces one class");
  }
  const double pi_fraud =
      static_cast<double>(cfg.n_fraud) / static_cast<double>(cfg.n_total);
  const double weight[2] = {(1.0 - pi_fraud) / p_class[0],
                            pi_fraud / p_class[1]};

  std::map<std::pair<int, int>, std::array<double, 2>> groups;
  for (std::size_t s = 0; s < kSigns.size(); ++s) {
    const int gv = q.use_video ? kSigns[s][0] : 0;
    const int ga = q.use_audio ? kSigns[s][1] : 0;
    auto& g = groups[{gv, ga}];
    g[0] += joint[s][0] * weight[0];
    g[1] += joint[s][1] * weight[1];
  }
  double acc = 0.0;
  for (const auto& [key, g] : groups) acc += std::max(g[0], g[1]);
  return acc;
}

}  // namespace

std::size_t Dataset::count_label(int label) const {
  std::size_t n = 0;
  for (const auto& r : records) n += r.label == label ? 1 : 0;
  return n;
}

std::size_t Dataset::feature_dim() const {
  return records.empty() ? 0 : records.front().video.len();
}

void validate(const Dataset& ds, std::size_t expected_dim) {
  std::set<std::string> ids;
  const std::size_t dim = expected_dim ? expected_dim : ds.feature_dim();
  for (std::size_t i = 0; i < ds.records.size(); ++i) {
    const auto& r = ds.records[i];
    const std::string where = "record " + std::to_string(i) + " ('" + r.id + "')";
    if (!ids.insert(r.id).second) throw InputError(where + ": duplicate id");
    if (r.label != kLegit && r.label != kFraud) {
      throw InputError(where + ": label must be 0 or 1");
    }
    if (r.video.len() != dim || r.audio.len() != dim) {
      throw InputError(where + ": feature vectors must have length " +
                       std::to_string(dim));
    }
    if (!r.video.all_finite() || !r.audio.all_finite()) {
      throw InputError(where + ": non-finite feature value");
    }
  }
}

void validate(const SynthConfig& cfg) {
  if (cfg.n_fraud == 0 || cfg.n_fraud >= cfg.n_total) {
    throw ParameterError("synthetic config: need 0 < n_fraud < n_total (got " +
                         std::to_string(cfg.n_fraud) + " of " +
                         std::to_string(cfg.n_total) + ")");
  }
  if (cfg.feature_dim == 0 || cfg.d_sig > cfg.feature_dim) {
    throw ParameterError("synthetic config: d_sig must not exceed the "
                         "feature dimension");
  }
  if (!(cfg.sigma >= 0.0)) {
    throw ParameterError("synthetic config: sigma must be non-negative");
  }
}

Dataset generate_synthetic(const SynthConfig& cfg) {
  validate(cfg);
  numkit::Rng rng(cfg.seed);
  const std::size_t quota[2] = {cfg.n_total - cfg.n_fraud, cfg.n_fraud};
  std::size_t filled[2] = {0, 0};
  const std::size_t max_attempts = kMaxAttemptsPerRecord * cfg.n_total;

  Dataset ds;
  ds.records.reserve(cfg.n_total);
  std::size_t attempts = 0;
  while (ds.records.size() < cfg.n_total) {
    if (++attempts > max_attempts) {
      throw GenerationError(
          "synthetic generator could not fill the class quotas (" +
          std::to_string(filled[1]) + "/" + std::to_string(quota[1]) +
          " fraud, " + std::to_string(filled[0]) + "/" +
          std::to_string(quota[0]) + " legit) after " +
          std::to_string(max_attempts) + " proposals");
    }
    const int sv = rng.bernoulli(0.5) ? 1 : -1;
    const int sa = rng.bernoulli(0.5) ? 1 : -1;
    const double score = latent_score(cfg, sv, sa) + cfg.sigma * rng.normal();
    const int label = score > 0.0 ? kFraud : kLegit;
    if (filled[label] == quota[label]) continue;
    ++filled[label];

    FeatureRecord r;
    r.id = "syn-" + std::to_string(ds.records.size());
    r.label = label;
    r.video = Vector(cfg.feature_dim);
    r.audio = Vector(cfg.feature_dim);
    for (std::size_t i = 0; i < cfg.feature_dim; ++i) {
      r.video[i] = rng.normal() + (i < cfg.d_sig ? cfg.amplitude * sv : 0.0);
    }
    for (std::size_t i = 0; i < cfg.feature_dim; ++i) {
      r.audio[i] = rng.normal() + (i < cfg.d_sig ? cfg.amplitude * sa : 0.0);
    }
    ds.records.push_back(std::move(r));
  }
  ds.provenance = "synthetic n_total=" + std::to_string(cfg.n_total) +
                  " n_fraud=" + std::to_string(cfg.n_fraud) +
                  " a=" + std::to_string(cfg.a) + " b=" + std::to_string(cfg.b) +
                  " c=" + std::to_string(cfg.c) +
                  " sigma=" + std::to_string(cfg.sigma) +
                  " d_sig=" + std::to_string(cfg.d_sig) +
                  " amplitude=" + std::to_string(cfg.amplitude) +
                  " seed=" + std::to_string(cfg.seed);
  return ds;
}

double bayes_ceiling_exact(const SynthConfig& cfg, CeilingQuery q) {
  validate(cfg);
  std::array<std::array<double, 2>, 4> joint{};
  for (std::size_t s = 0; s < kSigns.size(); ++s) {
    const double p1 = fraud_probability(cfg, kSigns[s][0], kSigns[s][1]);
    joint[s] = {0.25 * (1.0 - p1), 0.25 * p1};
  }
  return ceiling_from_joint(cfg, joint, q);
}

double bayes_ceiling_monte_carlo(const SynthConfig& cfg, std::size_t draws,
                                 std::uint64_t seed, CeilingQuery q) {
  validate(cfg);
  numkit::Rng rng(seed);
  std::array<std::array<double, 2>, 4> joint{};
  for (std::size_t n = 0; n < draws; ++n) {
    const int sv = rng.bernoulli(0.5) ? 1 : -1;
    const int sa = rng.bernoulli(0.5) ? 1 : -1;
    const double score = latent_score(cfg, sv, sa) + cfg.sigma * rng.normal();
    const std::size_t s = (sv > 0 ? 2 : 0) + (sa > 0 ? 1 : 0);
    joint[s][score > 0.0 ? 1 : 0] += 1.0;
  }
  for (auto& row : joint) {
    row[0] /= static_cast<double>(draws);
    row[1] /= static_cast<double>(draws);
  }
  return ceiling_from_joint(cfg, joint, q);
}

}  // namespace tfn::data
