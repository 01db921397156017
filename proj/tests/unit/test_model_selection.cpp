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

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <set>

#include "diabens/error.hpp"
#include "diabens/model_selection.hpp"
#include "fixtures.hpp"

using namespace diabens;

namespace {

Dataset balanced(std::size_t n, std::uint64_t seed) {
  Dataset d = fixtures::random_dataset(n, 2, seed);
  for (std::size_t i = 0; i < n; ++i) d.labels[i] = static_cast<int>(i % 2);
  return d;
}

// Label follows feature 0 with 20% flips; features 1..5 are noise.
Dataset planted(std::size_t n, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<std::vector<double>> rows;
  std::vector<int> y;
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<double> r(6);
    for (auto& v : r) v = rng.normal();
    int label = r[0] > 0 ? 1 : 0;
    if (rng.bernoulli(0.2)) label = 1 - label;
    rows.push_back(std::move(r));
    y.push_back(label);
  }
  return fixtures::make(rows, y);
}

}  // namespace

TEST_CASE("stratified folds") {
  std::vector<int> labels(10);
  for (std::size_t i = 0; i < 10; ++i) labels[i] = i < 5 ? 0 : 1;
  const auto folds = stratified_k_fold(labels, 5, 3);
  REQUIRE(folds.size() == 5);
  for (const auto& f : folds) {
    REQUIRE(f.size() == 2);
    CHECK(labels[f[0]] + labels[f[1]] == 1);
  }
  CHECK(stratified_k_fold(labels, 5, 3) == folds);
  CHECK_THROWS_AS(stratified_k_fold(labels, 6, 3), Error);
  CHECK_THROWS_AS(stratified_k_fold(labels, 1, 3), Error);
}

TEST_CASE("folds partition the rows and keep class proportions") {
  Rng rng(4);
  for (int t = 0; t < 30; ++t) {
    const std::size_t k = 2 + rng.below(9);
    const std::size_t n = 2 * k + rng.below(300);
    std::vector<int> labels(n);
    for (std::size_t i = 0; i < n; ++i) labels[i] = i < k ? 0 : (i < 2 * k ? 1 : (rng.bernoulli(0.3) ? 1 : 0));
    const auto folds = stratified_k_fold(labels, k, rng.next());
    std::set<std::size_t> seen;
    for (const auto& f : folds) {
      CHECK(std::is_sorted(f.begin(), f.end()));
      for (auto i : f) CHECK(seen.insert(i).second);
    }
    CHECK(seen.size() == n);
    for (int cls : {0, 1}) {
      const double share = static_cast<double>(std::count(labels.begin(), labels.end(), cls)) / static_cast<double>(k);
      for (const auto& f : folds) {
        const auto c = static_cast<double>(std::count_if(f.begin(), f.end(), [&](std::size_t i) { return labels[i] == cls; }));
        CHECK(std::abs(c - share) < 1.0);
      }
    }
  }
}

TEST_CASE("constant predictor scores the class balance") {
  const Dataset d = balanced(100, 1);
  const FitFn always_one = [](const Dataset&) -> ProbabilityFn {
    return [](const Matrix& x) { return std::vector<double>(x.rows(), 1.0); };
  };
  const CvResult r = cross_validate(d, always_one, 5, 2);
  CHECK(r.fold_reports.size() == 5);
  CHECK(*r.summary[0].mean == doctest::Approx(0.5).epsilon(1e-12));
  // Specificity is 0, NPV undefined in every fold.
  CHECK(*r.summary[4].mean == 0.0);
  CHECK_FALSE(r.summary[2].mean.has_value());
}

TEST_CASE("cv summary is consistent with the folds") {
  const Dataset d = fixtures::random_dataset(150, 4, 9);
  const CvResult r = cross_validate(d, ModelSpec{ModelKind::DecisionTree, HyperParams{}}, 4, 1);
  REQUIRE(r.fold_reports.size() == 4);
  CHECK(r.spec.kind == ModelKind::DecisionTree);
  for (std::size_t m = 0; m < 6; ++m) {
    std::vector<double> vals;
    for (const auto& f : r.fold_reports) {
      const auto v = f.values()[m];
      if (v) {
        CHECK(*v >= 0.0);
        CHECK(*v <= 1.0);
        vals.push_back(*v);
      }
    }
    if (vals.empty()) continue;
    double mean = 0;
    for (double v : vals) mean += v;
    mean /= static_cast<double>(vals.size());
    CHECK(*r.summary[m].mean == doctest::Approx(mean).epsilon(1e-12));
    CHECK(*r.summary[m].mean >= *r.summary[m].min);
    CHECK(*r.summary[m].mean <= *r.summary[m].max);
  }
}

TEST_CASE("validation rows never reach the fold transforms") {
  const Dataset d = fixtures::random_dataset(100, 3, 10);
  const auto folds = stratified_k_fold(d.labels, 5, 7);
  Dataset poisoned = d;
  for (auto i : folds[2]) {
    for (std::size_t c = 0; c < 3; ++c) poisoned.features(i, c) = 1e9;
  }
  const ModelSpec spec{ModelKind::GaussianNb, HyperParams{}};
  const CvResult a = cross_validate(d, spec, 5, 7);
  const CvResult b = cross_validate(poisoned, spec, 5, 7);
  CHECK(a.fold_preprocessors[2].standardizer.mean == b.fold_preprocessors[2].standardizer.mean);
  CHECK(a.fold_preprocessors[2].standardizer.stddev == b.fold_preprocessors[2].standardizer.stddev);
  CHECK(a.fold_preprocessors[2].imputation.fill_values == b.fold_preprocessors[2].imputation.fill_values);
  CHECK(a.fold_preprocessors[0].standardizer.mean != b.fold_preprocessors[0].standardizer.mean);
}

TEST_CASE("training failures name the fold") {
  const Dataset d = balanced(40, 3);
  int calls = 0;
  const FitFn flaky = [&](const Dataset&) -> ProbabilityFn {
    if (++calls == 3) throw_numeric("diverged");
    return [](const Matrix& x) { return std::vector<double>(x.rows(), 0.5); };
  };
  try {
    cross_validate(d, flaky, 4, 1);
    FAIL("expected error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::Numeric);
    CHECK(std::string(e.what()).find("fold 3") != std::string::npos);
  }
}

TEST_CASE("grid search basics") {
  const Dataset d = fixtures::random_dataset(80, 2, 5);
  HyperParams p;
  p.knn_k = 5;
  const auto single = grid_search(d, ModelKind::Knn, {p}, 4, 1);
  CHECK(single.best == p);
  CHECK(single.results.size() == 1);

  // Identical configurations tie; the first wins.
  const auto tie = grid_search(d, ModelKind::Knn, {p, p, p}, 4, 1);
  CHECK(tie.best_index == 0);

  CHECK_THROWS_AS(grid_search(d, ModelKind::Knn, {}, 4, 1), Error);
  CHECK_THROWS_AS(grid_search(d, ModelKind::Knn, {p}, 4, 1, "auc"), Error);
  CHECK(parse_objective("log_loss").minimize);
  CHECK(parse_objective("f1_score").metric_index == 5);
}

TEST_CASE("grid search selection does not depend on grid order") {
  const Dataset d = planted(200, 8);
  std::vector<HyperParams> grid;
  for (int k : {1, 3, 9, 15, 31}) {
    HyperParams p;
    p.knn_k = k;
    grid.push_back(p);
  }
  const auto a = grid_search(d, ModelKind::Knn, grid, 5, 2);
  std::reverse(grid.begin(), grid.end());
  const auto b = grid_search(d, ModelKind::Knn, grid, 5, 2);
  const double best_a = *a.results[a.best_index].summary[0].mean;
  const double best_b = *b.results[b.best_index].summary[0].mean;
  CHECK(best_a == best_b);
  std::size_t tied = 0;
  for (const auto& r : a.results) tied += *r.summary[0].mean == best_a ? 1 : 0;
  if (tied == 1) CHECK(a.best == b.best);
}

TEST_CASE("deep trees lose to the planted shallow structure") {
  const Dataset d = planted(400, 12);
  std::vector<HyperParams> grid;
  for (int depth = 1; depth <= 10; ++depth) {
    HyperParams p;
    p.tree_max_depth = depth;
    grid.push_back(p);
  }
  const auto r = grid_search(d, ModelKind::DecisionTree, grid, 5, 3);
  CHECK(r.best.tree_max_depth <= 2);
}

TEST_CASE("error curve") {
  const Dataset d = planted(120, 2);
  std::vector<HyperParams> grid;
  for (int k = 1; k <= 10; ++k) {
    HyperParams p;
    p.knn_k = k;
    grid.push_back(p);
  }
  const auto r = grid_search(d, ModelKind::Knn, grid, 5, 1);
  const auto curve = error_curve(r.results, "knn_k");
  REQUIRE(curve.size() == 10);
  for (std::size_t i = 0; i < curve.size(); ++i) {
    CHECK(curve[i].value == std::to_string(i + 1));
    CHECK(curve[i].cv_error == doctest::Approx(1 - *r.results[i].summary[0].mean).epsilon(1e-12));
  }
  // k = 1 memorizes the training folds.
  CHECK(curve[0].train_error == 0.0);
}

TEST_CASE("depth-7 tree on Pima, 5 folds") {
  const Dataset pima = load_csv_dataset(std::filesystem::path(DIABENS_DATA_DIR) / "pima_indians_diabetes.csv",
                                        CsvSchema{"Outcome", {}});
  const CvResult r = cross_validate(pima, ModelSpec{ModelKind::DecisionTree, HyperParams{}}, 5, 0);
  CHECK(*r.summary[0].mean >= 0.66);
  CHECK(*r.summary[0].mean <= 0.80);
}
