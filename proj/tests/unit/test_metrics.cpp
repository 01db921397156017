/*
 * Copyright 2026 The diabens Authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include <doctest.h>

#include <cmath>
#include <vector>

#include "diabens/error.hpp"
#include "diabens/metrics.hpp"
#include "diabens/random.hpp"
#include "oracles.hpp"

using namespace diabens;

TEST_CASE("confusion matrix counts") {
  const auto cm = confusion_matrix(std::vector<int>{1, 1, 0, 0}, std::vector<int>{1, 0, 0, 1});
  CHECK(cm == ConfusionMatrix{1, 1, 1, 1});

  const std::vector<int> y{1, 0, 1, 1, 0};
  const auto perfect = confusion_matrix(y, y);
  CHECK(perfect.fp == 0);
  CHECK(perfect.fn == 0);
  CHECK(perfect.total() == 5);

  const auto all_pos = confusion_matrix(std::vector<int>(5, 1), y);
  CHECK(all_pos.tn == 0);
  CHECK(all_pos.fn == 0);
}

TEST_CASE("confusion matrix rejects bad input") {
  CHECK_THROWS_AS(confusion_matrix(std::vector<int>{1, 0}, std::vector<int>{1}), Error);
  CHECK_THROWS_AS(confusion_matrix(std::vector<int>{2}, std::vector<int>{1}), Error);
  CHECK_THROWS_AS(confusion_matrix(std::vector<int>{}, std::vector<int>{}), Error);
}

TEST_CASE("metric suite arithmetic") {
  const auto r = metric_suite(ConfusionMatrix{2, 1, 5, 2});
  CHECK(*r.accuracy == doctest::Approx(0.7).epsilon(1e-12));
  CHECK(*r.precision == doctest::Approx(2.0 / 3.0).epsilon(1e-12));
  CHECK(*r.negative_predictive_value == doctest::Approx(5.0 / 7.0).epsilon(1e-12));
  CHECK(*r.sensitivity == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(*r.specificity == doctest::Approx(5.0 / 6.0).epsilon(1e-12));
  CHECK(*r.f1 == doctest::Approx(4.0 / 7.0).epsilon(1e-12));
  CHECK(format_metric(r.f1) == "0.5714");
  CHECK(format_metric(r.negative_predictive_value) == "0.7143");
}

TEST_CASE("reference precision/sensitivity pairs give the reference F1") {
  CHECK(std::abs(oracles::f1_from(0.0610, 0.5396) - 0.1097) < 1e-3);
  CHECK(std::abs(oracles::f1_from(0.1526, 0.5705) - 0.2408) < 1e-3);
  CHECK(std::abs(oracles::f1_from(0.1831, 0.6071) - 0.2814) < 1e-3);
}

TEST_CASE("degenerate denominators are undefined, not zero") {
  // Never predicts positive: precision 0/0.
  const auto r = metric_suite(ConfusionMatrix{0, 0, 5, 3});
  CHECK_FALSE(r.precision.has_value());
  CHECK_FALSE(r.f1.has_value());
  CHECK(*r.sensitivity == 0.0);
  CHECK(format_metric(r.precision) == "n/a");
  // No negatives predicted, all predictions right.
  const auto s = metric_suite(ConfusionMatrix{4, 0, 0, 0});
  CHECK_FALSE(s.negative_predictive_value.has_value());
  CHECK_FALSE(s.specificity.has_value());
  CHECK(*s.precision == 1.0);
  CHECK(metric_csv_fields(s) == "1.0000,1.0000,n/a,1.0000,n/a,1.0000");
}

TEST_CASE("metric identities on random confusion matrices") {
  Rng rng(11);
  for (int t = 0; t < 500; ++t) {
    ConfusionMatrix cm{rng.below(20), rng.below(20), rng.below(20), rng.below(20)};
    if (cm.total() == 0) continue;
    const auto r = metric_suite(cm);
    for (const auto& v : r.values()) {
      if (v) {
        CHECK(*v >= 0.0);
        CHECK(*v <= 1.0);
      }
    }
    const double p = static_cast<double>(cm.tp + cm.fn);
    const double n = static_cast<double>(cm.tn + cm.fp);
    if (r.sensitivity && r.specificity) {
      CHECK(*r.accuracy == doctest::Approx((*r.sensitivity * p + *r.specificity * n) / (p + n)).epsilon(1e-12));
    }
    if (r.f1) {
      const double tp = static_cast<double>(cm.tp);
      CHECK(*r.f1 == doctest::Approx(2 * tp / (2 * tp + cm.fp + cm.fn)).epsilon(1e-12));
    }
    // Swap classes.
    const auto sw = metric_suite(ConfusionMatrix{cm.tn, cm.fn, cm.tp, cm.fp});
    CHECK(sw.accuracy == r.accuracy);
    CHECK(sw.precision == r.negative_predictive_value);
    CHECK(sw.negative_predictive_value == r.precision);
    CHECK(sw.sensitivity == r.specificity);
    CHECK(sw.specificity == r.sensitivity);
  }
}

TEST_CASE("log loss values") {
  CHECK(log_loss(std::vector<double>{0.5}, std::vector<int>{1}) == doctest::Approx(std::log(2.0)).epsilon(1e-12));
  CHECK(log_loss(std::vector<double>{0.9, 0.1}, std::vector<int>{1, 0}) ==
        doctest::Approx(-std::log(0.9)).epsilon(1e-12));
  const double eps = 1e-15;
  CHECK(log_loss(std::vector<double>{1.0 - eps}, std::vector<int>{1}) < 1e-14);
  // Hard 0/1 mistakes are clipped, not infinite.
  const double hard = log_loss(std::vector<double>{0.0}, std::vector<int>{1});
  CHECK(std::isfinite(hard));
  CHECK(hard == doctest::Approx(-std::log(eps)).epsilon(1e-9));
  CHECK_THROWS_AS(log_loss(std::vector<double>{0.5, 0.5}, std::vector<int>{1}), Error);
}

TEST_CASE("log loss over constant predictors is smallest at the prevalence") {
  Rng rng(5);
  std::vector<int> y(200);
  std::size_t pos = 0;
  for (auto& v : y) {
    v = rng.bernoulli(0.3) ? 1 : 0;
    pos += static_cast<std::size_t>(v);
  }
  const double prev = static_cast<double>(pos) / static_cast<double>(y.size());
  const double at_prev = log_loss(std::vector<double>(y.size(), prev), y);
  CHECK(at_prev >= 0.0);
  for (double p = 0.01; p < 1.0; p += 0.01) {
    CHECK(log_loss(std::vector<double>(y.size(), p), y) >= at_prev - 1e-12);
  }
}

TEST_CASE("csv header follows the table column order") {
  CHECK(metric_csv_header() == "accuracy,precision,negative_prediction,sensitivity,specificity,f1_score");
}
