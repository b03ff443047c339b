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

#include <algorithm>
#include <cmath>

#include "doctest.h"
#include "json.hpp"
#include "test_util.hpp"
#include "tfn/ablation.hpp"
#include "tfn/error.hpp"
#include "tfn/metrics.hpp"

using namespace tfn;
using namespace tfn::eval;

TEST_CASE("confusion examples") {
  const std::vector<double> p{0.9, 0.1};
  const std::vector<int> y{1, 0};
  const auto cm = confusion(p, y, 0.5);
  CHECK(cm == ConfusionMatrix{1, 1, 0, 0});

  const std::vector<double> at(4, 0.5);
  const std::vector<int> mixed{1, 0, 1, 0};
  const auto boundary = confusion(at, mixed, 0.5);
  CHECK(boundary.tp == 2);
  CHECK(boundary.fp == 2);

  const std::vector<double> p7{0.9, 0.8, 0.2, 0.7, 0.1, 0.3, 0.4};
  const std::vector<int> y7{1, 1, 1, 0, 0, 0, 0};
  CHECK(confusion(p7, y7) == ConfusionMatrix{2, 3, 1, 1});

  CHECK_THROWS_AS(confusion(p7, y, 0.5), DimensionError);
  CHECK_THROWS_AS(confusion(p, y, 1.0), ParameterError);
}

TEST_CASE("metrics examples") {
  const auto r = metrics({2, 3, 1, 1});
  CHECK(r.accuracy == doctest::Approx(5.0 / 7.0).epsilon(1e-15));
  CHECK(r.precision == doctest::Approx(2.0 / 3.0).epsilon(1e-15));
  CHECK(r.recall == doctest::Approx(2.0 / 3.0).epsilon(1e-15));
  CHECK(r.f1 == doctest::Approx(2.0 / 3.0).epsilon(1e-15));
  CHECK_FALSE(r.degenerate);

  const auto perfect = metrics({10, 7, 0, 0});
  CHECK(perfect.accuracy == 1.0);
  CHECK(perfect.precision == 1.0);
  CHECK(perfect.recall == 1.0);
  CHECK(perfect.f1 == 1.0);

  const auto none = metrics({0, 5, 0, 3});
  CHECK(none.precision == 0.0);
  CHECK(none.f1 == 0.0);
  CHECK(none.degenerate);

  CHECK_THROWS_AS(metrics({0, 0, 0, 0}), InputError);
}

TEST_CASE("confusion matrix reported for the tensor fusion model") {
  // tp=299, tn=417, fp=44, fn=42
  const auto r = metrics({299, 417, 44, 42});
  CHECK(r.precision == doctest::Approx(299.0 / 343.0).epsilon(1e-15));
  CHECK(std::abs(100.0 * r.precision - 87.2) < 0.1);
  CHECK(std::abs(100.0 * r.recall - 87.7) < 0.1);  // 299/341
  CHECK(r.cm.total() == 802);

  // F1 from the stated precision 87.2% and recall 84.0%.
  const double p = 0.872, q = 0.840;
  CHECK(std::abs(100.0 * 2 * p * q / (p + q) - 85.6) < 0.1);
}

TEST_CASE("metrics agree with a naive re-tally on random inputs") {
  numkit::Rng rng(99);
  for (int trial = 0; trial < 1000; ++trial) {
    const std::size_t n = 1 + rng.below(60);
    const double threshold = 0.05 + 0.9 * rng.uniform();
    std::vector<double> p(n);
    std::vector<int> y(n);
    for (std::size_t i = 0; i < n; ++i) {
      p[i] = rng.uniform();
      y[i] = rng.bernoulli(0.4) ? 1 : 0;
    }
    const auto r = metrics(confusion(p, y, threshold), threshold);

    double tp = 0, tn = 0, fp = 0, fn = 0;
    for (std::size_t i = 0; i < n; ++i) {
      const int pred = p[i] >= threshold ? 1 : 0;
      tp += pred == 1 && y[i] == 1;
      tn += pred == 0 && y[i] == 0;
      fp += pred == 1 && y[i] == 0;
      fn += pred == 0 && y[i] == 1;
    }
    const double prec = tp + fp > 0 ? tp / (tp + fp) : 0.0;
    const double rec = tp + fn > 0 ? tp / (tp + fn) : 0.0;
    const double f1 = prec + rec > 0 ? 2 * prec * rec / (prec + rec) : 0.0;
    REQUIRE(r.accuracy == (tp + tn) / static_cast<double>(n));
    REQUIRE(r.precision == prec);
    REQUIRE(r.recall == rec);
    REQUIRE(r.f1 == f1);
    if (prec > 0 && rec > 0) {
      REQUIRE(std::abs(r.f1 - 2.0 / (1.0 / prec + 1.0 / rec)) < 1e-12);
    }
  }
}

TEST_CASE("raising the threshold never adds false positives") {
  numkit::Rng rng(5);
  std::vector<double> p(200);
  std::vector<int> y(200);
  for (std::size_t i = 0; i < 200; ++i) {
    p[i] = rng.uniform();
    y[i] = rng.bernoulli(0.5);
  }
  ConfusionMatrix prev = confusion(p, y, 0.01);
  for (double t = 0.02; t < 1.0; t += 0.01) {
    const auto cm = confusion(p, y, t);
    REQUIRE(cm.fp <= prev.fp);
    REQUIRE(cm.fn >= prev.fn);
    prev = cm;
  }
}

TEST_CASE("ablation runner") {
  const data::Dataset ds = testutil::small_dataset(50, 20, 6);
  const auto plan = data::stratified_kfold(ds, 2, 4);
  train::TrainConfig cfg;
  cfg.max_epochs = 2;
  cfg.seed = 17;
  train::CvOptions opts;
  opts.dims = model::Dims::scaled();

  SUBCASE("single variant matches run_cv") {
    const auto report = run_ablation(ds, plan, {model::Variant::kTFComplete}, cfg, opts);
    REQUIRE(report.rows.size() == 1);
    train::TrainConfig vcfg = cfg;
    vcfg.seed = variant_seed(cfg.seed, model::Variant::kTFComplete);
    const auto cv = train::run_cv(ds, plan, model::Variant::kTFComplete, vcfg, opts);
    CHECK(report.rows[0].cv.aggregate.f1.mean == cv.aggregate.f1.mean);
    CHECK(report.rows[0].cv.aggregate.accuracy.std == cv.aggregate.accuracy.std);
  }

  SUBCASE("all variants, table order, deterministic output") {
    const std::vector<model::Variant> reversed(model::kAllVariants.rbegin(),
                                               model::kAllVariants.rend());
    const auto a = run_ablation(ds, plan, reversed, cfg, opts);
    REQUIRE(a.rows.size() == 8);
    for (std::size_t i = 0; i < 8; ++i) CHECK(a.rows[i].variant == model::kAllVariants[i]);

    const auto b = run_ablation(ds, plan, reversed, cfg, opts);
    CHECK(a.to_json() == b.to_json());
    CHECK(a.to_csv() == b.to_csv());
    CHECK(a.to_text() == b.to_text());

    const auto doc = nlohmann::json::parse(a.to_json());
    CHECK(doc["format"] == "tfn-ablation");
    CHECK(doc["rows"].size() == 8);
    CHECK(doc["rows"][7]["variant"] == "tf-complete");
    CHECK(doc["rows"][7]["folds"].size() == 2);

    // header + 8 rows
    const std::string csv = a.to_csv();
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 9);
    const std::string text = a.to_text();
    CHECK(text.find("Complete TF") != std::string::npos);
    CHECK(text.find("Video Only") < text.find("Complete TF"));
  }

  SUBCASE("distinct per-variant seeds") {
    CHECK(variant_seed(1, model::Variant::kVideoOnly) !=
          variant_seed(1, model::Variant::kAudioOnly));
    CHECK(variant_seed(1, model::Variant::kVideoOnly) ==
          variant_seed(1, model::Variant::kVideoOnly));
  }

  SUBCASE("errors") {
    CHECK_THROWS_AS(run_ablation(ds, plan, {}, cfg, opts), ConfigurationError);
    CHECK_THROWS_AS(run_ablation(ds, plan,
                                 {model::Variant::kVideoOnly, model::Variant::kVideoOnly},
                                 cfg, opts),
                    ConfigurationError);
  }
}
