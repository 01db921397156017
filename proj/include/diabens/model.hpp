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

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "diabens/dataset.hpp"
#include "diabens/models.hpp"

namespace diabens {

// Order matches the ModelState alternatives.
enum class ModelKind {
  Knn,
  LinearSvm,
  DecisionTree,
  RandomForest,
  GradientBoosting,
  Mlp,
  GaussianNb,
};

inline constexpr std::array<ModelKind, 7> kAllModelKinds = {
    ModelKind::Knn,          ModelKind::LinearSvm,        ModelKind::DecisionTree,
    ModelKind::RandomForest, ModelKind::GradientBoosting, ModelKind::Mlp,
    ModelKind::GaussianNb};

// Short key used on the command line and in artifacts ("knn", "svm", ...).
std::string_view kind_key(ModelKind kind);
// Display name used in report tables ("K-NN", "SVM", ...).
std::string_view kind_title(ModelKind kind);
std::optional<ModelKind> parse_kind(std::string_view key);

struct HyperParams {
  int knn_k = 41;
  double svm_c = 1.0;
  int svm_epochs = 20;
  int tree_max_depth = 7;
  int forest_max_depth = 9;
  int forest_n_trees = 250;
  int gb_max_depth = 3;
  int gb_n_stages = 100;
  double gb_learning_rate = 0.1;
  std::vector<int> mlp_hidden_sizes{32};
  double mlp_learning_rate = 0.01;
  int mlp_epochs = 200;
  int mlp_batch_size = 32;
  double mlp_momentum = 0.9;
  double nb_var_floor = 1e-9;
  std::uint64_t seed = 0;

  friend bool operator==(const HyperParams&, const HyperParams&) = default;
};

// Throws a usage error on non-positive counts or rates.
void validate(const HyperParams& params);

// String access by key, used by config files, grids and serialization.
// mlp_hidden_sizes is written as colon-separated widths ("32:16").
const std::vector<std::string>& hyperparam_keys();
std::vector<std::string> hyperparam_keys_for(ModelKind kind);
std::string get_hyperparam(const HyperParams& params, std::string_view key);
void set_hyperparam(HyperParams& params, std::string_view key, std::string_view value);

using ModelState = std::variant<KnnModel, LinearSvmModel, DecisionTree, RandomForestModel,
                                GradientBoostingModel, MlpModel, GaussianNbModel>;

inline constexpr double kDefaultThreshold = 0.5;

// A fitted classifier of any kind. Immutable once built; inputs are expected
// in the same (already preprocessed) feature space as the training data.
class TrainedModel {
 public:
  TrainedModel(ModelState state, HyperParams params, std::vector<std::string> feature_names);

  ModelKind kind() const noexcept { return static_cast<ModelKind>(state_.index()); }
  std::size_t feature_count() const noexcept { return feature_names_.size(); }
  const std::vector<std::string>& feature_names() const noexcept { return feature_names_; }
  const HyperParams& hyperparams() const noexcept { return params_; }
  const ModelState& state() const noexcept { return state_; }

  // Preprocessing that produced the training matrix; carried for
  // serialization only, predict_proba does not apply it.
  const std::optional<StandardizerParams>& standardizer() const noexcept { return standardizer_; }
  void set_standardizer(std::optional<StandardizerParams> params) { standardizer_ = std::move(params); }

  double predict_proba(std::span<const double> x) const;
  // 1 iff predict_proba(x) >= threshold.
  int predict(std::span<const double> x, double threshold = kDefaultThreshold) const;

  std::vector<double> predict_proba(const Matrix& x) const;
  std::vector<int> predict(const Matrix& x, double threshold = kDefaultThreshold) const;

 private:
  void check_dimension(std::size_t n) const;

  ModelState state_;
  HyperParams params_;
  std::vector<std::string> feature_names_;
  std::optional<StandardizerParams> standardizer_;
};

TrainedModel train_model(ModelKind kind, const Dataset& train, const HyperParams& params);

// SVM: |w| per feature. Tree kinds: impurity decrease per feature normalized
// to sum 1. Other kinds are a usage error.
std::vector<double> feature_importance(const TrainedModel& model);

}  // namespace diabens
