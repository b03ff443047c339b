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
#include <functional>
#include <string>
#include <vector>

#include "tfn/data.hpp"
#include "tfn/metrics.hpp"
#include "tfn/model.hpp"

namespace tfn::train {

using model::Dims;
using model::ModelParams;
using model::Variant;

struct TrainConfig {
  double lr_max = 1e-4;
  double lr_min = 0.0;
  std::size_t batch_size = 8;
  std::size_t max_epochs = 100;
  std::size_t t_max = 0;  // 0 means max_epochs
  double weight_decay = 0.01;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
  double dropout_p = 0.2;
  std::size_t patience = 10;
  double threshold = eval::kDefaultThreshold;
  double val_fraction = 0.15;
  std::uint64_t seed = 0;

  std::size_t effective_t_max() const { return t_max ? t_max : max_epochs; }
};

// Throws ParameterError on out-of-range settings.
void validate(const TrainConfig& cfg);

// lr_min + (lr_max - lr_min) * (1 + cos(pi * epoch / t_max)) / 2, with
// epochs past t_max clamped to lr_min.
double cosine_lr(std::size_t epoch, const TrainConfig& cfg);

struct AdamWState {
  std::uint64_t t = 0;
  std::vector<double> m;  // flat, tensor order
  std::vector<double> v;

  AdamWState() = default;
  explicit AdamWState(const ModelParams& params);
};

// One decoupled-weight-decay Adam update. Decay applies to weight matrices
// only. Throws NumericError, leaving everything untouched, if any gradient
// entry is non-finite.
void adamw_step(ModelParams& params, const model::Gradients& grads,
                AdamWState& state, double lr, const TrainConfig& cfg);

struct EpochRecord {
  std::size_t epoch = 0;  // 1-based
  double lr = 0.0;
  double train_loss = 0.0;
  double val_loss = 0.0;
  eval::MetricsReport val;
};

struct TrainHistory {
  std::vector<EpochRecord> epochs;
  std::vector<std::string> warnings;
  std::size_t best_epoch = 0;

  // epoch,lr,train_loss,val_loss,val_acc,val_prec,val_rec,val_f1
  std::string to_csv() const;
};

// Tracks the best validation F1 (ties broken by lower validation loss) and
// the parameters that produced it.
class EarlyStopper {
 public:
  explicit EarlyStopper(std::size_t patience) : patience_(patience) {}

  // Returns true when training should stop.
  bool update(std::size_t epoch, double f1, double val_loss,
              const ModelParams& params);

  double best_metric() const { return best_f1_; }
  std::size_t best_epoch() const { return best_epoch_; }
  std::size_t epochs_since_improve() const { return since_; }
  const ModelParams& best_params() const { return best_; }

 private:
  std::size_t patience_;
  double best_f1_ = -1.0;
  double best_loss_ = 0.0;
  std::size_t best_epoch_ = 0;
  std::size_t since_ = 0;
  ModelParams best_;
};

struct TrainResult {
  ModelParams best;
  TrainHistory history;
};

// Minibatch training with cosine-annealed AdamW and F1-driven early
// stopping. Returns the checkpoint from the best validation epoch.
TrainResult train_one(Variant variant, const data::Dataset& train_set,
                      const data::Dataset& val_set, const TrainConfig& cfg,
                      const Dims& dims = Dims::full());

// Inference-mode probabilities for every record.
std::vector<double> predict_all(const ModelParams& params,
                                const data::Dataset& ds);

double mean_loss(std::span<const double> probs, std::span<const int> labels);

struct MetricSummary {
  double mean = 0.0;
  double std = 0.0;  // sample standard deviation across folds
};

struct AggregateReport {
  MetricSummary accuracy;
  MetricSummary precision;
  MetricSummary recall;
  MetricSummary f1;
};

AggregateReport aggregate(const std::vector<eval::MetricsReport>& reports);

struct FoldResult {
  std::size_t fold = 0;
  std::size_t train_size = 0;
  std::size_t val_size = 0;
  std::size_t test_size = 0;
  ModelParams params;
  TrainHistory history;
  eval::MetricsReport test;
};

struct CvResult {
  Variant variant = Variant::kTFComplete;
  std::vector<FoldResult> folds;
  AggregateReport aggregate;
};

struct CvOptions {
  Dims dims = Dims::full();
  std::size_t jobs = 1;  // folds trained concurrently
  // Called after each fold finishes, in fold order. Progress reporting only.
  std::function<void(Variant, const FoldResult&)> on_fold;
};

// Per fold: a stratified, seeded val_fraction of the training portion is
// held out for early stopping; the fold itself is the test set. Fold i uses
// the substream fork(i) of cfg.seed, so results do not depend on `jobs`.
CvResult run_cv(const data::Dataset& ds, const data::FoldPlan& plan,
                Variant variant, const TrainConfig& cfg,
                const CvOptions& options = {});

}  // namespace tfn::train
