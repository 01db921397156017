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

#include "diabens/model.hpp"

#include <charconv>
#include <cmath>
#include <sstream>

#include "diabens/csv.hpp"
#include "diabens/error.hpp"

namespace diabens {

namespace {

struct KindInfo {
  ModelKind kind;
  std::string_view key;
  std::string_view title;
};

constexpr std::array<KindInfo, 7> kKinds = {{
    {ModelKind::Knn, "knn", "K-NN"},
    {ModelKind::LinearSvm, "svm", "SVM"},
    {ModelKind::DecisionTree, "tree", "Decision Tree"},
    {ModelKind::RandomForest, "forest", "Random Forest"},
    {ModelKind::GradientBoosting, "boosting", "Gradient Boosting"},
    {ModelKind::Mlp, "mlp", "Neural Network"},
    {ModelKind::GaussianNb, "nb", "Naive Bayes"},
}};

int parse_int(std::string_view key, std::string_view text) {
  int v = 0;
  const auto res = std::from_chars(text.data(), text.data() + text.size(), v);
  if (text.empty() || res.ec != std::errc{} || res.ptr != text.data() + text.size()) {
    throw_usage("hyperparameter " + std::string(key) + ": '" + std::string(text) + "' is not an integer");
  }
  return v;
}

double parse_real(std::string_view key, std::string_view text) {
  double v = 0.0;
  if (!csv::parse_double(text, v)) {
    throw_usage("hyperparameter " + std::string(key) + ": '" + std::string(text) + "' is not a number");
  }
  return v;
}

std::uint64_t parse_u64(std::string_view key, std::string_view text) {
  std::uint64_t v = 0;
  const auto res = std::from_chars(text.data(), text.data() + text.size(), v);
  if (text.empty() || res.ec != std::errc{} || res.ptr != text.data() + text.size()) {
    throw_usage(std::string(key) + ": '" + std::string(text) + "' is not a non-negative integer");
  }
  return v;
}

}  // namespace

std::string_view kind_key(ModelKind kind) { return kKinds[static_cast<std::size_t>(kind)].key; }

std::string_view kind_title(ModelKind kind) { return kKinds[static_cast<std::size_t>(kind)].title; }

std::optional<ModelKind> parse_kind(std::string_view key) {
  for (const auto& k : kKinds) {
    if (k.key == key) return k.kind;
  }
  if (key == "dt") return ModelKind::DecisionTree;
  if (key == "rf") return ModelKind::RandomForest;
  if (key == "gb") return ModelKind::GradientBoosting;
  if (key == "naive_bayes") return ModelKind::GaussianNb;
  return std::nullopt;
}

void validate(const HyperParams& p) {
  auto positive_count = [](int v, const char* name) {
    if (v < 1) throw_usage(std::string(name) + " must be at least 1");
  };
  auto positive_rate = [](double v, const char* name) {
    if (!(v > 0.0) || !std::isfinite(v)) throw_usage(std::string(name) + " must be positive");
  };
  positive_count(p.knn_k, "knn_k");
  positive_rate(p.svm_c, "svm_c");
  positive_count(p.svm_epochs, "svm_epochs");
  positive_count(p.tree_max_depth, "tree_max_depth");
  positive_count(p.forest_max_depth, "forest_max_depth");
  positive_count(p.forest_n_trees, "forest_n_trees");
  positive_count(p.gb_max_depth, "gb_max_depth");
  if (p.gb_n_stages < 0) throw_usage("gb_n_stages must be non-negative");
  positive_rate(p.gb_learning_rate, "gb_learning_rate");
  if (p.mlp_hidden_sizes.empty()) throw_usage("mlp_hidden_sizes needs at least one layer");
  for (int h : p.mlp_hidden_sizes) positive_count(h, "mlp_hidden_sizes entries");
  positive_rate(p.mlp_learning_rate, "mlp_learning_rate");
  positive_count(p.mlp_epochs, "mlp_epochs");
  positive_count(p.mlp_batch_size, "mlp_batch_size");
  if (!(p.mlp_momentum >= 0.0 && p.mlp_momentum < 1.0)) throw_usage("mlp_momentum must lie in [0, 1)");
  positive_rate(p.nb_var_floor, "nb_var_floor");
}

const std::vector<std::string>& hyperparam_keys() {
  static const std::vector<std::string> keys = {
      "knn_k",          "svm_c",          "svm_epochs",       "tree_max_depth",
      "forest_max_depth", "forest_n_trees", "gb_max_depth",   "gb_n_stages",
      "gb_learning_rate", "mlp_hidden_sizes", "mlp_learning_rate", "mlp_epochs",
      "mlp_batch_size", "mlp_momentum",     "nb_var_floor",     "seed"};
  return keys;
}

std::vector<std::string> hyperparam_keys_for(ModelKind kind) {
  switch (kind) {
    case ModelKind::Knn: return {"knn_k"};
    case ModelKind::LinearSvm: return {"svm_c", "svm_epochs", "seed"};
    case ModelKind::DecisionTree: return {"tree_max_depth"};
    case ModelKind::RandomForest: return {"forest_max_depth", "forest_n_trees", "seed"};
    case ModelKind::GradientBoosting: return {"gb_max_depth", "gb_n_stages", "gb_learning_rate"};
    case ModelKind::Mlp:
      return {"mlp_hidden_sizes", "mlp_learning_rate", "mlp_epochs", "mlp_batch_size", "mlp_momentum", "seed"};
    case ModelKind::GaussianNb: return {"nb_var_floor"};
  }
  return {};
}

std::string get_hyperparam(const HyperParams& p, std::string_view key) {
  if (key == "knn_k") return std::to_string(p.knn_k);
  if (key == "svm_c") return csv::format_double(p.svm_c);
  if (key == "svm_epochs") return std::to_string(p.svm_epochs);
  if (key == "tree_max_depth") return std::to_string(p.tree_max_depth);
  if (key == "forest_max_depth") return std::to_string(p.forest_max_depth);
  if (key == "forest_n_trees") return std::to_string(p.forest_n_trees);
  if (key == "gb_max_depth") return std::to_string(p.gb_max_depth);
  if (key == "gb_n_stages") return std::to_string(p.gb_n_stages);
  if (key == "gb_learning_rate") return csv::format_double(p.gb_learning_rate);
  if (key == "mlp_hidden_sizes") {
    std::string out;
    for (int h : p.mlp_hidden_sizes) {
      if (!out.empty()) out.push_back(':');
      out += std::to_string(h);
    }
    return out;
  }
  if (key == "mlp_learning_rate") return csv::format_double(p.mlp_learning_rate);
  if (key == "mlp_epochs") return std::to_string(p.mlp_epochs);
  if (key == "mlp_batch_size") return std::to_string(p.mlp_batch_size);
  if (key == "mlp_momentum") return csv::format_double(p.mlp_momentum);
  if (key == "nb_var_floor") return csv::format_double(p.nb_var_floor);
  if (key == "seed") return std::to_string(p.seed);
  throw_usage("unknown hyperparameter '" + std::string(key) + "'");
}

void set_hyperparam(HyperParams& p, std::string_view key, std::string_view value) {
  if (key == "knn_k") p.knn_k = parse_int(key, value);
  else if (key == "svm_c") p.svm_c = parse_real(key, value);
  else if (key == "svm_epochs") p.svm_epochs = parse_int(key, value);
  else if (key == "tree_max_depth") p.tree_max_depth = parse_int(key, value);
  else if (key == "forest_max_depth") p.forest_max_depth = parse_int(key, value);
  else if (key == "forest_n_trees") p.forest_n_trees = parse_int(key, value);
  else if (key == "gb_max_depth") p.gb_max_depth = parse_int(key, value);
  else if (key == "gb_n_stages") p.gb_n_stages = parse_int(key, value);
  else if (key == "gb_learning_rate") p.gb_learning_rate = parse_real(key, value);
  else if (key == "mlp_hidden_sizes") {
    std::vector<int> sizes;
    std::string_view rest = value;
    while (!rest.empty()) {
      const auto sep = rest.find_first_of(":x");
      sizes.push_back(parse_int(key, rest.substr(0, sep)));
      rest = sep == std::string_view::npos ? std::string_view{} : rest.substr(sep + 1);
    }
    if (sizes.empty()) throw_usage("mlp_hidden_sizes needs at least one layer");
    p.mlp_hidden_sizes = std::move(sizes);
  } else if (key == "mlp_learning_rate") p.mlp_learning_rate = parse_real(key, value);
  else if (key == "mlp_epochs") p.mlp_epochs = parse_int(key, value);
  else if (key == "mlp_batch_size") p.mlp_batch_size = parse_int(key, value);
  else if (key == "mlp_momentum") p.mlp_momentum = parse_real(key, value);
  else if (key == "nb_var_floor") p.nb_var_floor = parse_real(key, value);
  else if (key == "seed") p.seed = parse_u64(key, value);
  else throw_usage("unknown hyperparameter '" + std::string(key) + "'");
}

TrainedModel::TrainedModel(ModelState state, HyperParams params, std::vector<std::string> feature_names)
    : state_(std::move(state)), params_(std::move(params)), feature_names_(std::move(feature_names)) {}

void TrainedModel::check_dimension(std::size_t n) const {
  if (n != feature_count()) {
    throw_usage(std::string(kind_key(kind())) + " model expects " + std::to_string(feature_count()) +
                " features, got " + std::to_string(n));
  }
}

double TrainedModel::predict_proba(std::span<const double> x) const {
  check_dimension(x.size());
  const double p = std::visit([&](const auto& m) { return m.predict_proba(x); }, state_);
  return std::clamp(p, 0.0, 1.0);
}

int TrainedModel::predict(std::span<const double> x, double threshold) const {
  return predict_proba(x) >= threshold ? 1 : 0;
}

std::vector<double> TrainedModel::predict_proba(const Matrix& x) const {
  check_dimension(x.cols());
  std::vector<double> out(x.rows());
  for (std::size_t i = 0; i < x.rows(); ++i) out[i] = predict_proba(x.row(i));
  return out;
}

std::vector<int> TrainedModel::predict(const Matrix& x, double threshold) const {
  const auto p = predict_proba(x);
  std::vector<int> out(p.size());
  for (std::size_t i = 0; i < p.size(); ++i) out[i] = p[i] >= threshold ? 1 : 0;
  return out;
}

TrainedModel train_model(ModelKind kind, const Dataset& train, const HyperParams& p) {
  validate(p);
  validate(train);
  ModelState state = [&]() -> ModelState {
    switch (kind) {
      case ModelKind::Knn: return train_knn(train, p.knn_k);
      case ModelKind::LinearSvm: return train_linear_svm(train, {p.svm_c, p.svm_epochs, p.seed});
      case ModelKind::DecisionTree: return train_decision_tree(train, p.tree_max_depth);
      case ModelKind::RandomForest: {
        ForestOptions o;
        o.n_trees = p.forest_n_trees;
        o.max_depth = p.forest_max_depth;
        o.seed = p.seed;
        return train_random_forest(train, o);
      }
      case ModelKind::GradientBoosting:
        return train_gradient_boosting(train, {p.gb_n_stages, p.gb_max_depth, p.gb_learning_rate});
      case ModelKind::Mlp: {
        MlpOptions o;
        o.hidden_sizes = p.mlp_hidden_sizes;
        o.learning_rate = p.mlp_learning_rate;
        o.momentum = p.mlp_momentum;
        o.epochs = p.mlp_epochs;
        o.batch_size = p.mlp_batch_size;
        o.seed = p.seed;
        return train_mlp(train, o);
      }
      case ModelKind::GaussianNb: return train_gaussian_nb(train, p.nb_var_floor);
    }
    throw_usage("unknown model kind");
  }();
  return TrainedModel(std::move(state), p, train.feature_names);
}

std::vector<double> feature_importance(const TrainedModel& model) {
  switch (model.kind()) {
    case ModelKind::LinearSvm: {
      std::vector<double> out;
      for (double w : std::get<LinearSvmModel>(model.state()).weights) out.push_back(std::abs(w));
      return out;
    }
    case ModelKind::DecisionTree:
      return normalize_importance(std::get<DecisionTree>(model.state()).impurity_decrease);
    case ModelKind::RandomForest: {
      const auto& forest = std::get<RandomForestModel>(model.state());
      std::vector<double> sum(model.feature_count(), 0.0);
      for (const auto& t : forest.trees) {
        const auto imp = normalize_importance(t.impurity_decrease);
        for (std::size_t j = 0; j < sum.size(); ++j) sum[j] += imp[j];
      }
      return normalize_importance(sum);
    }
    case ModelKind::GradientBoosting: {
      const auto& gb = std::get<GradientBoostingModel>(model.state());
      std::vector<double> sum(model.feature_count(), 0.0);
      for (const auto& t : gb.stages) {
        for (std::size_t j = 0; j < sum.size(); ++j) sum[j] += t.impurity_decrease[j];
      }
      return normalize_importance(sum);
    }
    default:
      throw_usage("feature importance is not available for " + std::string(kind_key(model.kind())) + " models");
  }
}

}  // namespace diabens
