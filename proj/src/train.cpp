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

#include "tfn/train.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <limits>
#include <numbers>
#include <numeric>
#include <sstream>

#include "tfn/error.hpp"
#include "tfn/ops.hpp"

namespace tfn::train {

namespace {

using numkit::Matrix;
using numkit::Rng;

// Substream indices derived from a training seed.
constexpr std::uint64_t kInitStream = 0;
constexpr std::uint64_t kShuffleStream = 1;
constexpr std::uint64_t kDropoutStream = 2;

constexpr std::size_t kEvalBatch = 64;

struct Batch {
  Matrix video;
  Matrix audio;
  std::vector<int> labels;
};

Batch gather(const data::Dataset& ds, std::span<const std::size_t> idx) {
  const std::size_t dim = ds.feature_dim();
  Batch b{Matrix(idx.size(), dim), Matrix(idx.size(), dim), {}};
  b.labels.reserve(idx.size());
  for (std::size_t s = 0; s < idx.size(); ++s) {
    const auto& r = ds.records[idx[s]];
    std::copy(r.video.values().begin(), r.video.values().end(),
              b.video.row(s).begin());
    std::copy(r.audio.values().begin(), r.audio.values().end(),
              b.audio.row(s).begin());
    b.labels.push_back(r.label);
  }
  return b;
}

std::vector<int> labels_of(const data::Dataset& ds) {
  std::vector<int> out;
  out.reserve(ds.size());
  for (const auto& r : ds.records) out.push_back(r.label);
  return out;
}

data::Dataset subset(const data::Dataset& ds, std::span<const std::size_t> idx) {
  data::Dataset out;
  out.provenance = ds.provenance;
  out.records.reserve(idx.size());
  for (std::size_t i : idx) out.records.push_back(ds.records[i]);
  return out;
}

MetricSummary summarize(const std::vector<double>& xs) {
  MetricSummary s;
  if (xs.empty()) return s;
  const double n = static_cast<double>(xs.size());
  double sum = 0.0;
  for (double x : xs) sum += x;
  s.mean = sum / n;
  if (xs.size() > 1) {
    double ss = 0.0;
    for (double x : xs) ss += (x - s.mean) * (x - s.mean);
    s.std = std::sqrt(ss / (n - 1.0));
  }
  return s;
}

FoldResult run_fold(const data::Dataset& ds, const data::FoldPlan& plan,
                    std::size_t fold, Variant variant, const TrainConfig& cfg,
                    const Dims& dims) {
  Rng fold_rng = Rng(cfg.seed).fork(fold);
  TrainConfig fold_cfg = cfg;
  fold_cfg.seed = fold_rng.next_u64();

  // Stratified early-stopping holdout drawn from the training portion.
  std::vector<std::size_t> by_class[2];
  for (std::size_t i : plan.complement_indices(fold)) {
    by_class[ds.records[i].label == data::kFraud ? 1 : 0].push_back(i);
  }
  std::vector<std::size_t> train_idx, val_idx;
  for (auto& members : by_class) {
    fold_rng.shuffle(std::span<std::size_t>(members));
    auto n_val = static_cast<std::size_t>(
        std::lround(cfg.val_fraction * static_cast<double>(members.size())));
    n_val = std::clamp<std::size_t>(n_val, 1, members.size() - 1);
    val_idx.insert(val_idx.end(), members.begin(),
                   members.begin() + static_cast<std::ptrdiff_t>(n_val));
    train_idx.insert(train_idx.end(),
                     members.begin() + static_cast<std::ptrdiff_t>(n_val),
                     members.end());
  }
  std::sort(train_idx.begin(), train_idx.end());
  std::sort(val_idx.begin(), val_idx.end());
  const auto test_idx = plan.fold_indices(fold);

  const data::Dataset train_set = subset(ds, train_idx);
  const data::Dataset val_set = subset(ds, val_idx);
  const data::Dataset test_set = subset(ds, test_idx);

  TrainResult trained = train_one(variant, train_set, val_set, fold_cfg, dims);
  const auto probs = predict_all(trained.best, test_set);
  const auto labels = labels_of(test_set);

  FoldResult r;
  r.fold = fold;
  r.train_size = train_set.size();
  r.val_size = val_set.size();
  r.test_size = test_set.size();
  r.test = eval::metrics(eval::confusion(probs, labels, cfg.threshold),
                         cfg.threshold);
  r.params = std::move(trained.best);
  r.history = std::move(trained.history);
  return r;
}

}  // namespace

void validate(const TrainConfig& cfg) {
  auto fail = [](const std::string& what) {
    throw ParameterError("train config: " + what);
  };
  if (!(cfg.beta1 > 0.0 && cfg.beta1 < 1.0)) fail("beta1 must lie in (0, 1)");
  if (!(cfg.beta2 > 0.0 && cfg.beta2 < 1.0)) fail("beta2 must lie in (0, 1)");
  if (!(cfg.lr_min <= cfg.lr_max)) fail("lr_min must not exceed lr_max");
  if (cfg.lr_min < 0.0) fail("learning rates must be non-negative");
  if (cfg.batch_size < 1) fail("batch_size must be at least 1");
  if (cfg.patience < 1) fail("patience must be at least 1");
  if (cfg.max_epochs < 1) fail("max_epochs must be at least 1");
  if (!(cfg.eps > 0.0)) fail("eps must be positive");
  if (!(cfg.weight_decay >= 0.0)) fail("weight_decay must be non-negative");
  if (!(cfg.dropout_p >= 0.0 && cfg.dropout_p < 1.0)) {
    fail("dropout_p must lie in [0, 1)");
  }
  if (!(cfg.threshold > 0.0 && cfg.threshold < 1.0)) {
    fail("threshold must lie in (0, 1)");
  }
  if (!(cfg.val_fraction > 0.0 && cfg.val_fraction < 1.0)) {
    fail("val_fraction must lie in (0, 1)");
  }
}

double cosine_lr(std::size_t epoch, const TrainConfig& cfg) {
  const std::size_t t_max = cfg.effective_t_max();
  if (epoch >= t_max) return cfg.lr_min;
  const double phase = std::numbers::pi * static_cast<double>(epoch) /
                       static_cast<double>(t_max);
  return cfg.lr_min + (cfg.lr_max - cfg.lr_min) * (1.0 + std::cos(phase)) / 2.0;
}

AdamWState::AdamWState(const ModelParams& params)
    : m(model::parameter_count(params), 0.0),
      v(model::parameter_count(params), 0.0) {}

constexpr double kMaxFinite = std::numeric_limits<double>::max();

void adamw_step(ModelParams& params, const model::Gradients& grads,
                AdamWState& state, double lr, const TrainConfig& cfg) {
  auto theta = model::tensors(params);
  const auto g = model::tensors(grads);
  const std::size_t n = model::parameter_count(params);
  if (g.size() != theta.size() || state.m.size() != n || state.v.size() != n) {
    throw DimensionError("adamw_step: gradients or optimizer state do not "
                         "match the parameters");
  }
  for (std::size_t k = 0; k < theta.size(); ++k) {
    if (g[k].values.size() != theta[k].values.size()) {
      throw DimensionError("adamw_step: gradient " + g[k].name +
                           " has the wrong size");
    }
    bool finite = true;
    for (double x : g[k].values) finite &= std::abs(x) <= kMaxFinite;
    if (!finite) {
      throw NumericError("adamw_step: non-finite gradient in " + g[k].name);
    }
  }

  state.t += 1;
  const double b1 = cfg.beta1;
  const double b2 = cfg.beta2;
  const double inv_correction1 =
      1.0 / (1.0 - std::pow(b1, static_cast<double>(state.t)));
  const double inv_correction2 =
      1.0 / (1.0 - std::pow(b2, static_cast<double>(state.t)));
  std::size_t offset = 0;
  for (std::size_t k = 0; k < theta.size(); ++k) {
    double* w = theta[k].values.data();
    const double* gk = g[k].values.data();
    double* m = state.m.data() + offset;
    double* v = state.v.data() + offset;
    const double decay = theta[k].is_weight ? lr * cfg.weight_decay : 0.0;
    const std::size_t len = theta[k].values.size();
    for (std::size_t i = 0; i < len; ++i) {
      m[i] = b1 * m[i] + (1.0 - b1) * gk[i];
      v[i] = b2 * v[i] + (1.0 - b2) * gk[i] * gk[i];
      const double m_hat = m[i] * inv_correction1;
      const double v_hat = v[i] * inv_correction2;
      w[i] = w[i] - lr * (m_hat / (std::sqrt(v_hat) + cfg.eps)) - decay * w[i];
    }
    offset += len;
  }
}

std::string TrainHistory::to_csv() const {
  std::ostringstream out;
  out.precision(17);
  out << "epoch,lr,train_loss,val_loss,val_acc,val_prec,val_rec,val_f1\n";
  for (const auto& e : epochs) {
    out << e.epoch << ',' << e.lr << ',' << e.train_loss << ',' << e.val_loss
        << ',' << e.val.accuracy << ',' << e.val.precision << ','
        << e.val.recall << ',' << e.val.f1 << '\n';
  }
  return out.str();
}

bool EarlyStopper::update(std::size_t epoch, double f1, double val_loss,
                          const ModelParams& params) {
  const bool improved =
      f1 > best_f1_ || (f1 == best_f1_ && val_loss < best_loss_);
  if (improved) {
    best_f1_ = f1;
    best_loss_ = val_loss;
    best_epoch_ = epoch;
    best_ = params;
    since_ = 0;
    return false;
  }
  ++since_;
  return since_ >= patience_;
}

double mean_loss(std::span<const double> probs, std::span<const int> labels) {
  double total = 0.0;
  for (std::size_t i = 0; i < probs.size(); ++i) {
    total += numkit::bce_loss(probs[i], labels[i]);
  }
  return probs.empty() ? 0.0 : total / static_cast<double>(probs.size());
}

std::vector<double> predict_all(const ModelParams& params,
                                const data::Dataset& ds) {
  std::vector<double> probs;
  probs.reserve(ds.size());
  Rng unused(0);
  std::vector<std::size_t> idx(ds.size());
  std::iota(idx.begin(), idx.end(), 0);
  for (std::size_t start = 0; start < idx.size(); start += kEvalBatch) {
    const std::size_t end = std::min(idx.size(), start + kEvalBatch);
    const Batch b = gather(ds, std::span(idx).subspan(start, end - start));
    const auto t = model::forward_batch(params, b.video, b.audio, false, unused);
    probs.insert(probs.end(), t.prob.values().begin(), t.prob.values().end());
  }
  return probs;
}

TrainResult train_one(Variant variant, const data::Dataset& train_set,
                      const data::Dataset& val_set, const TrainConfig& cfg,
                      const Dims& dims) {
  validate(cfg);
  if (train_set.size() == 0 || val_set.size() == 0) {
    throw InputError("train_one: training and validation sets must be non-empty");
  }
  if (train_set.feature_dim() != dims.input ||
      val_set.feature_dim() != dims.input) {
    throw DimensionError("train_one: dataset features have length " +
                         std::to_string(train_set.feature_dim()) +
                         ", model expects " + std::to_string(dims.input));
  }

  const Rng root(cfg.seed);
  Rng shuffle_rng = root.fork(kShuffleStream);
  Rng dropout_rng = root.fork(kDropoutStream);
  ModelParams params = model::init_params(
      variant, root.fork(kInitStream).next_u64(), dims, cfg.dropout_p);
  AdamWState state(params);
  model::Gradients grads = model::zeros_like(params);
  EarlyStopper stopper(cfg.patience);

  TrainHistory history;
  const auto val_labels = labels_of(val_set);
  if (val_set.count_label(data::kFraud) == 0 ||
      val_set.count_label(data::kLegit) == 0) {
    history.warnings.push_back(
        "validation set contains a single class; F1 is degenerate");
  }

  std::vector<std::size_t> order(train_set.size());
  std::iota(order.begin(), order.end(), 0);

  for (std::size_t epoch = 1; epoch <= cfg.max_epochs; ++epoch) {
    const double lr = cosine_lr(epoch - 1, cfg);
    shuffle_rng.shuffle(std::span<std::size_t>(order));

    double loss_sum = 0.0;
    for (std::size_t start = 0; start < order.size(); start += cfg.batch_size) {
      const std::size_t end = std::min(order.size(), start + cfg.batch_size);
      const Batch b = gather(train_set, std::span(order).subspan(start, end - start));
      const auto trace =
          model::forward_batch(params, b.video, b.audio, true, dropout_rng);
      loss_sum += model::batch_loss(trace, b.labels) *
                  static_cast<double>(b.labels.size());
      for (auto& t : model::tensors(grads)) {
        std::fill(t.values.begin(), t.values.end(), 0.0);
      }
      model::backward_batch(params, trace, b.labels,
                            1.0 / static_cast<double>(b.labels.size()), grads);
      adamw_step(params, grads, state, lr, cfg);
    }

    EpochRecord rec;
    rec.epoch = epoch;
    rec.lr = lr;
    rec.train_loss = loss_sum / static_cast<double>(order.size());
    const auto val_probs = predict_all(params, val_set);
    rec.val_loss = mean_loss(val_probs, val_labels);
    rec.val = eval::metrics(
        eval::confusion(val_probs, val_labels, cfg.threshold), cfg.threshold);
    history.epochs.push_back(rec);

    if (stopper.update(epoch, rec.val.f1, rec.val_loss, params)) break;
  }
  history.best_epoch = stopper.best_epoch();
  return {stopper.best_params(), std::move(history)};
}

AggregateReport aggregate(const std::vector<eval::MetricsReport>& reports) {
  std::vector<double> acc, prec, rec, f1;
  for (const auto& r : reports) {
    acc.push_back(r.accuracy);
    prec.push_back(r.precision);
    rec.push_back(r.recall);
    f1.push_back(r.f1);
  }
  return {summarize(acc), summarize(prec), summarize(rec), summarize(f1)};
}

CvResult run_cv(const data::Dataset& ds, const data::FoldPlan& plan,
                Variant variant, const TrainConfig& cfg,
                const CvOptions& options) {
  validate(cfg);
  if (plan.assignments.size() != ds.size()) {
    throw ConfigurationError("run_cv: fold plan covers " +
                             std::to_string(plan.assignments.size()) +
                             " records but the dataset has " +
                             std::to_string(ds.size()));
  }
  CvResult result;
  result.variant = variant;
  result.folds.resize(plan.k);
  if (options.jobs <= 1) {
    for (std::size_t f = 0; f < plan.k; ++f) {
      result.folds[f] = run_fold(ds, plan, f, variant, cfg, options.dims);
      if (options.on_fold) options.on_fold(variant, result.folds[f]);
    }
  } else {
    for (std::size_t f0 = 0; f0 < plan.k; f0 += options.jobs) {
      std::vector<std::future<FoldResult>> pending;
      for (std::size_t f = f0; f < std::min(plan.k, f0 + options.jobs); ++f) {
        pending.push_back(std::async(std::launch::async, [&, f] {
          return run_fold(ds, plan, f, variant, cfg, options.dims);
        }));
      }
      for (std::size_t i = 0; i < pending.size(); ++i) {
        result.folds[f0 + i] = pending[i].get();
        if (options.on_fold) options.on_fold(variant, result.folds[f0 + i]);
      }
    }
  }
  std::vector<eval::MetricsReport> tests;
  for (const auto& f : result.folds) tests.push_back(f.test);
  result.aggregate = aggregate(tests);
  return result;
}

}  // namespace tfn::train
