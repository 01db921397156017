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
#include <functional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "diabens/dataset.hpp"
#include "diabens/metrics.hpp"
#include "diabens/model.hpp"

namespace diabens {

using FoldIndices = std::vector<std::vector<std::size_t>>;

// Each fold ascending. Every class needs at least `folds` members.
FoldIndices stratified_k_fold(std::span<const int> labels, std::size_t folds, std::uint64_t seed);

struct Preprocessor {
  ImputationParams imputation;
  StandardizerParams standardizer;
};

// Mean imputation followed by standardization, both fit on `train` only.
Preprocessor fit_preprocessor(const Dataset& train);
Dataset apply_preprocessor(const Preprocessor& prep, const Dataset& data);

struct ModelSpec {
  ModelKind kind = ModelKind::DecisionTree;
  HyperParams params;
};

struct MetricSummary {
  // Over the folds where the metric is defined; unset when it never is.
  MetricValue mean;
  MetricValue stddev;  // population
  MetricValue min;
  MetricValue max;
};

struct CvResult {
  ModelSpec spec;
  std::vector<MetricReport> fold_reports;
  std::vector<double> fold_log_loss;
  std::vector<double> fold_train_accuracy;
  std::vector<Preprocessor> fold_preprocessors;
  std::array<MetricSummary, 6> summary;  // table column order
  MetricSummary log_loss;
  MetricSummary train_accuracy;
};

// Row-wise probabilities for a feature matrix.
using ProbabilityFn = std::function<std::vector<double>(const Matrix&)>;
// Fits on a preprocessed training fold.
using FitFn = std::function<ProbabilityFn(const Dataset&)>;

CvResult cross_validate(const Dataset& data, const FitFn& fit, std::size_t folds, std::uint64_t seed);
CvResult cross_validate(const Dataset& data, const ModelSpec& spec, std::size_t folds,
                        std::uint64_t seed);

// Objective names: the six metric names plus "log_loss" (minimized).
struct Objective {
  std::string name;
  int metric_index = 0;  // -1 for log_loss
  bool minimize = false;
};

Objective parse_objective(std::string_view name);

// NaN when the objective is undefined for the result.
double objective_value(const CvResult& result, const Objective& objective);

struct GridSearchResult {
  std::size_t best_index = 0;
  HyperParams best;
  std::vector<CvResult> results;  // grid order
};

GridSearchResult grid_search(const Dataset& data, ModelKind kind, const std::vector<HyperParams>& grid,
                             std::size_t folds, std::uint64_t seed, std::string_view objective = "accuracy");

struct CurvePoint {
  std::string value;
  double train_error = 0.0;
  double cv_error = 0.0;
};

// Mean (1 - accuracy) against one hyperparameter. When other parameters vary
// too, each value keeps its best (lowest cv_error) configuration.
std::vector<CurvePoint> error_curve(const std::vector<CvResult>& results, std::string_view key);

}  // namespace diabens
