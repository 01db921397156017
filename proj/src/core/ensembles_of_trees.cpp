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

#include <algorithm>
#include <atomic>
#include <cmath>
#include <numeric>
#include <thread>

#include "diabens/error.hpp"
#include "diabens/models.hpp"
#include "diabens/random.hpp"

namespace diabens {

namespace {

std::vector<double> label_targets(const Dataset& data) {
  return {data.labels.begin(), data.labels.end()};
}

std::vector<std::size_t> all_rows(std::size_t n) {
  std::vector<std::size_t> rows(n);
  std::iota(rows.begin(), rows.end(), std::size_t{0});
  return rows;
}

// Mean logistic loss for log-odds F, computed without forming sigmoid(F).
double logistic_loss(std::span<const double> f, std::span<const int> y) {
  double sum = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i) {
    const double z = f[i];
    sum += std::max(z, 0.0) + std::log1p(std::exp(-std::abs(z))) - (y[i] == 1 ? z : 0.0);
  }
  return sum / static_cast<double>(f.size());
}

}  // namespace

DecisionTree train_decision_tree(const Dataset& train, int max_depth) {
  validate(train);
  if (train.rows() == 0) throw_data("cannot train a decision tree on an empty dataset");
  if (max_depth < 1) throw_usage("tree max depth must be at least 1");
  const auto target = label_targets(train);
  const auto rows = all_rows(train.rows());
  TreeBuildOptions opts;
  opts.max_depth = max_depth;
  return build_tree(train.features, target, rows, opts);
}

double RandomForestModel::predict_proba(std::span<const double> x) const {
  double sum = 0.0;
  for (const auto& t : trees) sum += t.predict(x);
  return sum / static_cast<double>(trees.size());
}

RandomForestModel train_random_forest(const Dataset& train, const ForestOptions& options) {
  validate(train);
  if (train.rows() == 0) throw_data("cannot train a random forest on an empty dataset");
  if (train.rows() < 2) throw_data("random forest needs at least 2 rows");
  if (options.n_trees < 1) throw_usage("forest needs at least one tree");
  if (options.max_depth < 1) throw_usage("forest max depth must be at least 1");

  const std::size_t n = train.rows();
  const auto target = label_targets(train);
  TreeBuildOptions opts;
  opts.max_depth = options.max_depth;
  if (options.subsample_features) {
    opts.max_features = static_cast<std::size_t>(std::ceil(std::sqrt(static_cast<double>(train.cols()))));
  }

  RandomForestModel model;
  model.trees.resize(static_cast<std::size_t>(options.n_trees));
  // Each tree owns a stream derived from (seed, tree index), so the result
  // does not depend on how trees are distributed over threads.
  auto grow = [&](std::size_t t) {
    Rng rng(derive_seed(options.seed, t));
    std::vector<std::size_t> rows(n);
    if (options.bootstrap) {
      for (auto& r : rows) r = static_cast<std::size_t>(rng.below(n));
    } else {
      std::iota(rows.begin(), rows.end(), std::size_t{0});
    }
    model.trees[t] = build_tree(train.features, target, rows, opts, &rng);
  };

  const std::size_t workers =
      std::min<std::size_t>(std::max(1u, std::thread::hardware_concurrency()), model.trees.size());
  if (workers <= 1) {
    for (std::size_t t = 0; t < model.trees.size(); ++t) grow(t);
    return model;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::atomic<bool> failed{false};
  {
    std::vector<std::jthread> pool;
    for (std::size_t w = 0; w < workers; ++w) {
      pool.emplace_back([&] {
        for (std::size_t t = next++; t < model.trees.size() && !failed; t = next++) {
          try {
            grow(t);
          } catch (...) {
            if (!failed.exchange(true)) failure = std::current_exception();
          }
        }
      });
    }
  }
  if (failure) std::rethrow_exception(failure);
  return model;
}

double GradientBoostingModel::decision(std::span<const double> x) const {
  double f = initial_log_odds;
  for (const auto& t : stages) f += learning_rate * t.predict(x);
  return f;
}

double GradientBoostingModel::predict_proba(std::span<const double> x) const {
  return sigmoid(decision(x));
}

GradientBoostingModel train_gradient_boosting(const Dataset& train, const BoostingOptions& options,
                                              std::vector<double>* stage_losses) {
  validate(train);
  if (options.n_stages < 0) throw_usage("boosting stage count must be non-negative");
  if (options.max_depth < 1) throw_usage("boosting max depth must be at least 1");
  if (!(options.learning_rate > 0.0)) throw_usage("boosting learning rate must be positive");
  const std::size_t n = train.rows();
  const std::size_t positives = train.count_label(1);
  if (positives == 0 || positives == n) {
    throw_data("gradient boosting needs both classes (prior log-odds undefined)");
  }

  GradientBoostingModel model;
  const double prevalence = static_cast<double>(positives) / static_cast<double>(n);
  model.initial_log_odds = std::log(prevalence / (1.0 - prevalence));
  model.learning_rate = options.learning_rate;

  std::vector<double> f(n, model.initial_log_odds);
  std::vector<double> p(n);
  std::vector<double> residual(n);
  const auto rows = all_rows(n);
  TreeBuildOptions opts;
  opts.max_depth = options.max_depth;
  opts.criterion = SplitCriterion::Variance;
  // Newton step on the log loss for the rows of a leaf.
  const LeafValueFn newton = [&](std::span<const std::size_t> leaf_rows) {
    double num = 0.0;
    double den = 0.0;
    for (auto r : leaf_rows) {
      num += residual[r];
      den += p[r] * (1.0 - p[r]);
    }
    return den < 1e-150 ? 0.0 : num / den;
  };

  if (stage_losses) {
    stage_losses->clear();
    stage_losses->push_back(logistic_loss(f, train.labels));
  }
  for (int m = 0; m < options.n_stages; ++m) {
    for (std::size_t i = 0; i < n; ++i) {
      p[i] = sigmoid(f[i]);
      residual[i] = train.labels[i] - p[i];
    }
    auto tree = build_tree(train.features, residual, rows, opts, nullptr, newton);
    for (std::size_t i = 0; i < n; ++i) f[i] += options.learning_rate * tree.predict(train.features.row(i));
    model.stages.push_back(std::move(tree));
    if (stage_losses) stage_losses->push_back(logistic_loss(f, train.labels));
  }
  return model;
}

}  // namespace diabens
