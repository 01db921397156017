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

#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "diabens/matrix.hpp"
#include "diabens/random.hpp"

namespace diabens {

enum class SplitCriterion {
  Gini,      // binary targets in {0,1}
  Variance,  // real-valued targets (boosting residuals)
};

struct TreeNode {
  std::int32_t feature = -1;  // -1 marks a leaf
  double threshold = 0.0;     // x[feature] <= threshold goes left
  std::int32_t left = -1;
  std::int32_t right = -1;
  double value = 0.0;         // leaf output
  std::uint64_t samples = 0;

  bool is_leaf() const noexcept { return feature < 0; }
  friend bool operator==(const TreeNode&, const TreeNode&) = default;
};

// Binary CART tree stored as a flat node array, root at index 0.
struct DecisionTree {
  std::vector<TreeNode> nodes;
  std::size_t feature_count = 0;
  // Total weighted impurity decrease per feature (not normalized).
  std::vector<double> impurity_decrease;

  double predict(std::span<const double> x) const;
  double predict_proba(std::span<const double> x) const { return predict(x); }
  std::size_t leaf_for(std::span<const double> x) const;
  int depth() const;

  friend bool operator==(const DecisionTree&, const DecisionTree&) = default;
};

struct TreeBuildOptions {
  int max_depth = 7;
  // Features considered per node; 0 means all of them.
  std::size_t max_features = 0;
  std::size_t min_samples_split = 2;
  SplitCriterion criterion = SplitCriterion::Gini;
};

// Output value for a leaf given the rows that reached it. Defaults to the
// mean target when empty.
using LeafValueFn = std::function<double(std::span<const std::size_t>)>;

// Greedy CART growth over the given rows (duplicates allowed, as produced by
// bootstrap sampling). Candidate thresholds are midpoints between consecutive
// distinct sorted values; ties keep the lowest feature index, then the lowest
// threshold. `feature_rng` is only drawn from when max_features restricts the
// candidate set.
DecisionTree build_tree(const Matrix& x, std::span<const double> target,
                        std::span<const std::size_t> rows, const TreeBuildOptions& options,
                        Rng* feature_rng = nullptr, const LeafValueFn& leaf_value = {});

// Scales to sum 1; an all-zero vector is returned unchanged.
std::vector<double> normalize_importance(std::span<const double> raw);

}  // namespace diabens
