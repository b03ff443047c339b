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

#include "tfn/ablation.hpp"

#include <algorithm>
#include <cstdio>
#include <sstream>

#include "json.hpp"
#include "tfn/error.hpp"

namespace tfn::eval {

namespace {

using nlohmann::ordered_json;

ordered_json summary_json(const train::AggregateReport& a, bool want_std) {
  const auto pick = [&](const train::MetricSummary& m) {
    return want_std ? m.std : m.mean;
  };
  return ordered_json{{"accuracy", pick(a.accuracy)},
                      {"precision", pick(a.precision)},
                      {"recall", pick(a.recall)},
                      {"f1", pick(a.f1)}};
}

ordered_json config_json(const train::TrainConfig& cfg) {
  return ordered_json{{"lr_max", cfg.lr_max},
                      {"lr_min", cfg.lr_min},
                      {"batch_size", cfg.batch_size},
                      {"max_epochs", cfg.max_epochs},
                      {"t_max", cfg.effective_t_max()},
                      {"weight_decay", cfg.weight_decay},
                      {"beta1", cfg.beta1},
                      {"beta2", cfg.beta2},
                      {"eps", cfg.eps},
                      {"dropout", cfg.dropout_p},
                      {"patience", cfg.patience},
                      {"val_fraction", cfg.val_fraction}};
}

ordered_json row_json(const train::CvResult& cv, std::uint64_t seed) {
  ordered_json folds = ordered_json::array();
  for (const auto& f : cv.folds) {
    const auto& m = f.test;
    folds.push_back(ordered_json{
        {"fold", f.fold},
        {"train_size", f.train_size},
        {"val_size", f.val_size},
        {"test_size", f.test_size},
        {"best_epoch", f.history.best_epoch},
        {"epochs_run", f.history.epochs.size()},
        {"accuracy", m.accuracy},
        {"precision", m.precision},
        {"recall", m.recall},
        {"f1", m.f1},
        {"degenerate", m.degenerate},
        {"tp", m.cm.tp},
        {"tn", m.cm.tn},
        {"fp", m.cm.fp},
        {"fn", m.cm.fn}});
  }
  return ordered_json{{"variant", model::variant_name(cv.variant)},
                      {"label", model::variant_label(cv.variant)},
                      {"seed", seed},
                      {"mean", summary_json(cv.aggregate, false)},
                      {"std", summary_json(cv.aggregate, true)},
                      {"folds", std::move(folds)}};
}

std::string pct(const train::MetricSummary& m) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%6.2f ± %5.2f", 100.0 * m.mean, 100.0 * m.std);
  return buf;
}

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6f", v);
  return buf;
}

}  // namespace

const AblationRow* AblationReport::find(model::Variant v) const {
  for (const auto& r : rows) {
    if (r.variant == v) return &r;
  }
  return nullptr;
}

std::string AblationReport::to_text() const {
  std::size_t width = 7;
  for (const auto& r : rows) {
    width = std::max(width, model::variant_label(r.variant).size());
  }
  std::ostringstream out;
  const auto cell = [&](std::string_view s, std::size_t w) {
    out << s << std::string(w > s.size() ? w - s.size() : 0, ' ');
  };
  // "±" is two bytes but one column.
  constexpr std::size_t kCol = 17;
  cell("Variant", width + 2);
  for (const char* h : {"Accuracy (%)", "Precision (%)", "Recall (%)", "F1 (%)"}) {
    cell(h, kCol);
  }
  out << '\n';
  for (const auto& r : rows) {
    const auto& a = r.cv.aggregate;
    cell(model::variant_label(r.variant), width + 2);
    for (const auto* m : {&a.accuracy, &a.precision, &a.recall, &a.f1}) {
      cell(pct(*m), kCol + 1);
    }
    out << '\n';
  }
  return out.str();
}

std::string AblationReport::to_csv() const {
  std::ostringstream out;
  out << "variant,label,accuracy_mean,accuracy_std,precision_mean,"
         "precision_std,recall_mean,recall_std,f1_mean,f1_std\n";
  for (const auto& r : rows) {
    const auto& a = r.cv.aggregate;
    out << model::variant_name(r.variant) << ',' << model::variant_label(r.variant);
    for (const auto* m : {&a.accuracy, &a.precision, &a.recall, &a.f1}) {
      out << ',' << num(m->mean) << ',' << num(m->std);
    }
    out << '\n';
  }
  return out.str();
}

std::string AblationReport::to_json() const {
  ordered_json rows_json = ordered_json::array();
  for (const auto& r : rows) rows_json.push_back(row_json(r.cv, r.seed));
  ordered_json doc{{"format", "tfn-ablation"},
                   {"version", 1},
                   {"dataset", dataset},
                   {"folds", k},
                   {"seed", seed},
                   {"threshold", threshold},
                   {"train_config", config_json(config)},
                   {"rows", std::move(rows_json)}};
  return doc.dump(2) + "\n";
}

std::uint64_t variant_seed(std::uint64_t base_seed, model::Variant v) {
  return numkit::Rng(base_seed)
      .fork(0x100 + static_cast<std::uint64_t>(v))
      .next_u64();
}

AblationReport run_ablation(const data::Dataset& ds, const data::FoldPlan& plan,
                            const std::vector<model::Variant>& variants,
                            const train::TrainConfig& cfg,
                            const train::CvOptions& options) {
  if (variants.empty()) {
    throw ConfigurationError("run_ablation: no variants requested");
  }
  std::vector<model::Variant> ordered = variants;
  std::sort(ordered.begin(), ordered.end());
  if (std::adjacent_find(ordered.begin(), ordered.end()) != ordered.end()) {
    throw ConfigurationError("run_ablation: variant requested twice");
  }

  AblationReport report;
  report.k = plan.k;
  report.seed = cfg.seed;
  report.threshold = cfg.threshold;
  report.dataset = ds.provenance;
  report.config = cfg;
  for (model::Variant v : ordered) {
    train::TrainConfig vcfg = cfg;
    vcfg.seed = variant_seed(cfg.seed, v);
    AblationRow row;
    row.variant = v;
    row.seed = vcfg.seed;
    row.cv = train::run_cv(ds, plan, v, vcfg, options);
    report.rows.push_back(std::move(row));
  }
  return report;
}

std::string cv_report_json(const train::CvResult& cv,
                           const train::TrainConfig& cfg,
                           const std::string& dataset) {
  ordered_json doc{{"format", "tfn-cv"},
                   {"version", 1},
                   {"dataset", dataset},
                   {"folds", cv.folds.size()},
                   {"threshold", cfg.threshold},
                   {"train_config", config_json(cfg)},
                   {"result", row_json(cv, cfg.seed)}};
  return doc.dump(2) + "\n";
}

}  // namespace tfn::eval
