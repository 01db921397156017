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
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "diabens/dataset.hpp"
#include "diabens/matrix.hpp"
#include "diabens/tree.hpp"

namespace diabens {

double sigmoid(double z);

// --------------------------------------------------------------------------
// k-nearest neighbours

struct KnnModel {
  Matrix points;
  std::vector<int> labels;
  int k = 1;

  // Fraction of positive labels among the k nearest training rows (squared
  // Euclidean distance, ties to the lower row index).
  double predict_proba(std::span<const double> x) const;
  std::vector<std::size_t> neighbours(std::span<const double> x) const;

  friend bool operator==(const KnnModel&, const KnnModel&) = default;
};

KnnModel train_knn(const Dataset& train, int k);

// --------------------------------------------------------------------------
// Linear SVM

struct SvmOptions {
  double c = 1.0;
  int epochs = 20;
  std::uint64_t seed = 0;
};

struct LinearSvmModel {
  std::vector<double> weights;
  double bias = 0.0;
  // Logistic map on the decision score: p = sigmoid(scale * s + offset).
  double platt_scale = 1.0;
  double platt_offset = 0.0;

  double decision(std::span<const double> x) const;
  double predict_proba(std::span<const double> x) const;

  friend bool operator==(const LinearSvmModel&, const LinearSvmModel&) = default;
};

LinearSvmModel train_linear_svm(const Dataset& train, const SvmOptions& options);

struct PlattParams {
  double scale = 1.0;
  double offset = 0.0;
};

// Fits sigmoid(scale * s + offset) to labels by regularized maximum
// likelihood (smoothed targets, Newton iterations with backtracking).
PlattParams fit_platt(std::span<const double> scores, std::span<const int> labels);

// --------------------------------------------------------------------------
// Decision tree

DecisionTree train_decision_tree(const Dataset& train, int max_depth);

// --------------------------------------------------------------------------
// Random forest

struct ForestOptions {
  int n_trees = 250;
  int max_depth = 9;
  std::uint64_t seed = 0;
  // Test hooks: with both off and n_trees = 1 the forest is a plain tree.
  bool bootstrap = true;
  bool subsample_features = true;
};

struct RandomForestModel {
  std::vector<DecisionTree> trees;

  double predict_proba(std::span<const double> x) const;
  friend bool operator==(const RandomForestModel&, const RandomForestModel&) = default;
};

RandomForestModel train_random_forest(const Dataset& train, const ForestOptions& options);

// --------------------------------------------------------------------------
// Gradient boosting (binary log loss)

struct BoostingOptions {
  int n_stages = 100;
  int max_depth = 3;
  double learning_rate = 0.1;
};

struct GradientBoostingModel {
  double initial_log_odds = 0.0;
  double learning_rate = 0.1;
  std::vector<DecisionTree> stages;

  double decision(std::span<const double> x) const;
  double predict_proba(std::span<const double> x) const;

  friend bool operator==(const GradientBoostingModel&, const GradientBoostingModel&) = default;
};

// When `stage_losses` is given it receives the training log loss of the prior
// model followed by the loss after every stage (n_stages + 1 values).
GradientBoostingModel train_gradient_boosting(const Dataset& train, const BoostingOptions& options,
                                              std::vector<double>* stage_losses = nullptr);

// --------------------------------------------------------------------------
// Multi-layer perceptron

struct MlpLayer {
  std::size_t inputs = 0;
  std::size_t outputs = 0;
  std::vector<double> weights;  // outputs x inputs, row-major
  std::vector<double> bias;

  friend bool operator==(const MlpLayer&, const MlpLayer&) = default;
};

// ReLU hidden layers, one logistic output unit.
struct MlpModel {
  std::vector<MlpLayer> layers;

  double logit(std::span<const double> x) const;
  double predict_proba(std::span<const double> x) const;

  std::size_t parameter_count() const;
  std::vector<double> parameters() const;
  void set_parameters(std::span<const double> values);

  friend bool operator==(const MlpModel&, const MlpModel&) = default;
};

struct MlpOptions {
  std::vector<int> hidden_sizes{32};
  double learning_rate = 0.01;
  double momentum = 0.9;
  int epochs = 200;
  int batch_size = 32;
  std::uint64_t seed = 0;
};

// Fan-in scaled uniform initialization; biases start at zero.
MlpModel init_mlp(std::size_t inputs, const std::vector<int>& hidden_sizes, std::uint64_t seed);

struct LossGradient {
  double loss = 0.0;
  std::vector<double> gradient;  // parameters() layout
};

// Mean binary cross-entropy over the given rows and its gradient.
LossGradient mlp_loss_gradient(const MlpModel& model, const Matrix& x, std::span<const int> y,
                               std::span<const std::size_t> rows);
LossGradient mlp_loss_gradient(const MlpModel& model, const Matrix& x, std::span<const int> y);

MlpModel train_mlp(const Dataset& train, const MlpOptions& options);

// --------------------------------------------------------------------------
// Gaussian naive Bayes

struct GaussianNbModel {
  std::array<double, 2> log_prior{};
  std::array<std::vector<double>, 2> mean;
  std::array<std::vector<double>, 2> variance;

  // log P(C = c) + sum_i log N(x_i | mean, variance), for c = 0, 1.
  std::array<double, 2> log_joint(std::span<const double> x) const;
  std::array<double, 2> posterior(std::span<const double> x) const;
  double predict_proba(std::span<const double> x) const;

  friend bool operator==(const GaussianNbModel&, const GaussianNbModel&) = default;
};

// Per-class variances are floored at var_floor times the largest overall
// feature variance.
GaussianNbModel train_gaussian_nb(const Dataset& train, double var_floor);

}  // namespace diabens
