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

#include "diabens/tree.hpp"

#include <algorithm>
#include <numeric>

#include "diabens/error.hpp"

namespace diabens {

namespace {

// n * impurity for a node with `n` samples, target sum `s` and sum of squares `q`.
double weighted_impurity(SplitCriterion criterion, double n, double s, double q) {
  if (n <= 0.0) return 0.0;
  if (criterion == SplitCriterion::Gini) return 2.0 * s * (n - s) / n;
  return std::max(0.0, q - s * s / n);
}

struct SplitChoice {
  bool found = false;
  std::size_t feature = 0;
  double threshold = 0.0;
  double child_cost = 0.0;
};

class TreeBuilder {
 public:
  TreeBuilder(const Matrix& x, std::span<const double> target, const TreeBuildOptions& options,
              Rng* rng, const LeafValueFn& leaf_value)
      : x_(x), target_(target), options_(options), rng_(rng), leaf_value_(leaf_value) {}

  DecisionTree build(std::span<const std::size_t> rows) {
    tree_.feature_count = x_.cols();
    tree_.impurity_decrease.assign(x_.cols(), 0.0);
    std::vector<std::size_t> all(rows.begin(), rows.end());
    grow(std::move(all), 0);
    return std::move(tree_);
  }

 private:
  std::int32_t grow(std::vector<std::size_t> rows, int depth) {
    const auto index = static_cast<std::int32_t>(tree_.nodes.size());
    tree_.nodes.emplace_back();
    double s = 0.0;
    double q = 0.0;
    for (auto r : rows) {
      s += target_[r];
      q += target_[r] * target_[r];
    }
    const double n = static_cast<double>(rows.size());
    {
      TreeNode& node = tree_.nodes[static_cast<std::size_t>(index)];
      node.samples = rows.size();
      node.value = s / n;
    }

    const bool pure = std::all_of(rows.begin(), rows.end(),
                                  [&](std::size_t r) { return target_[r] == target_[rows.front()]; });
    SplitChoice split;
    if (depth < options_.max_depth && rows.size() >= options_.min_samples_split && !pure) {
      split = find_split(rows, weighted_impurity(options_.criterion, n, s, q));
    }
    if (!split.found) {
      if (leaf_value_) tree_.nodes[static_cast<std::size_t>(index)].value = leaf_value_(rows);
      return index;
    }

    tree_.impurity_decrease[split.feature] +=
        std::max(0.0, weighted_impurity(options_.criterion, n, s, q) - split.child_cost);

    std::vector<std::size_t> left;
    std::vector<std::size_t> right;
    for (auto r : rows) (x_(r, split.feature) <= split.threshold ? left : right).push_back(r);
    rows.clear();
    rows.shrink_to_fit();

    const auto l = grow(std::move(left), depth + 1);
    const auto r = grow(std::move(right), depth + 1);
    TreeNode& node = tree_.nodes[static_cast<std::size_t>(index)];
    node.feature = static_cast<std::int32_t>(split.feature);
    node.threshold = split.threshold;
    node.left = l;
    node.right = r;
    return index;
  }

  std::vector<std::size_t> candidate_features() {
    std::vector<std::size_t> features(x_.cols());
    std::iota(features.begin(), features.end(), std::size_t{0});
    const std::size_t k = options_.max_features;
    if (k == 0 || k >= features.size() || rng_ == nullptr) return features;
    for (std::size_t i = 0; i < k; ++i) {
      const auto j = i + static_cast<std::size_t>(rng_->below(features.size() - i));
      std::swap(features[i], features[j]);
    }
    features.resize(k);
    std::sort(features.begin(), features.end());
    return features;
  }

  SplitChoice find_split(const std::vector<std::size_t>& rows, double parent_cost) {
    SplitChoice best;
    best.child_cost = parent_cost;
    const double tolerance = 1e-12 * std::max(parent_cost, 1.0);
    const double n = static_cast<double>(rows.size());
    double total_s = 0.0;
    double total_q = 0.0;
    for (auto r : rows) {
      total_s += target_[r];
      total_q += target_[r] * target_[r];
    }

    std::vector<std::pair<double, std::size_t>> order(rows.size());
    for (std::size_t f : candidate_features()) {
      for (std::size_t i = 0; i < rows.size(); ++i) order[i] = {x_(rows[i], f), rows[i]};
      std::sort(order.begin(), order.end());
      double ls = 0.0;
      double lq = 0.0;
      for (std::size_t i = 0; i + 1 < order.size(); ++i) {
        const double t = target_[order[i].second];
        ls += t;
        lq += t * t;
        const double lo = order[i].first;
        const double hi = order[i + 1].first;
        if (!(lo < hi)) continue;
        const double nl = static_cast<double>(i + 1);
        const double cost = weighted_impurity(options_.criterion, nl, ls, lq) +
                            weighted_impurity(options_.criterion, n - nl, total_s - ls, total_q - lq);
        if (!best.found || cost < best.child_cost - tolerance) {
          double mid = 0.5 * lo + 0.5 * hi;
          if (!(mid < hi)) mid = lo;
          best = {true, f, mid, cost};
        }
      }
    }
    return best;
  }

  const Matrix& x_;
  std::span<const double> target_;
  const TreeBuildOptions& options_;
  Rng* rng_;
  const LeafValueFn& leaf_value_;
  DecisionTree tree_;
};

}  // namespace

std::size_t DecisionTree::leaf_for(std::span<const double> x) const {
  std::size_t i = 0;
  while (!nodes[i].is_leaf()) {
    const auto& n = nodes[i];
    i = static_cast<std::size_t>(x[static_cast<std::size_t>(n.feature)] <= n.threshold ? n.left : n.right);
  }
  return i;
}

double DecisionTree::predict(std::span<const double> x) const { return nodes[leaf_for(x)].value; }

int DecisionTree::depth() const {
  if (nodes.empty()) return 0;
  std::vector<int> level(nodes.size(), 0);
  int deepest = 0;
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    deepest = std::max(deepest, level[i]);
    if (!nodes[i].is_leaf()) {
      level[static_cast<std::size_t>(nodes[i].left)] = level[i] + 1;
      level[static_cast<std::size_t>(nodes[i].right)] = level[i] + 1;
    }
  }
  return deepest;
}

DecisionTree build_tree(const Matrix& x, std::span<const double> target,
                        std::span<const std::size_t> rows, const TreeBuildOptions& options,
                        Rng* feature_rng, const LeafValueFn& leaf_value) {
  if (rows.empty()) throw_data("cannot grow a tree on an empty dataset");
  if (target.size() != x.rows()) throw_usage("tree target length does not match row count");
  if (options.max_depth < 0) throw_usage("max depth must be non-negative");
  TreeBuilder builder(x, target, options, feature_rng, leaf_value);
  return builder.build(rows);
}

std::vector<double> normalize_importance(std::span<const double> raw) {
  std::vector<double> out(raw.begin(), raw.end());
  const double total = std::accumulate(out.begin(), out.end(), 0.0);
  if (total > 0.0) {
    for (auto& v : out) v /= total;
  }
  return out;
}

}  // namespace diabens
