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
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "diabens/dataset.hpp"
#include "diabens/metrics.hpp"
#include "diabens/model.hpp"
#include "diabens/model_selection.hpp"
#include "diabens/nelder_mead.hpp"

namespace diabens {

// Divides by the sum and rounds onto a 2^-32 grid, so that weight vectors
// differing only by a positive scale factor yield identical results. Throws a
// usage error for negative, non-finite or all-zero weights.
std::vector<double> normalize_weights(std::span<const double> weights);

// sum_i w_i p_i over normalized weights, clamped to the range of the
// contributing member probabilities.
double combine_probabilities(std::span<const double> normalized_weights,
                             std::span<const double> member_probabilities);

// Weighted soft vote. Weights are stored verbatim (any positive scale) and
// normalized for computation.
class EnsembleModel {
 public:
  EnsembleModel(std::vector<TrainedModel> members, std::vector<double> weights,
                double threshold = kDefaultThreshold);

  const std::vector<TrainedModel>& members() const noexcept { return members_; }
  const std::vector<double>& weights() const noexcept { return weights_; }
  const std::vector<double>& normalized_weights() const noexcept { return normalized_; }
  double threshold() const noexcept { return threshold_; }
  std::size_t feature_count() const noexcept { return members_.front().feature_count(); }

  double predict_proba(std::span<const double> x) const;
  int predict(std::span<const double> x) const;
  std::vector<double> predict_proba(const Matrix& x) const;
  std::vector<int> predict(const Matrix& x) const;

 private:
  std::vector<TrainedModel> members_;
  std::vector<double> weights_;
  std::vector<double> normalized_;
  double threshold_;
};

// n x m matrix of member probabilities (column j = member j).
Matrix member_probabilities(const std::vector<TrainedModel>& members, const Matrix& x);

struct WeightOptimizerOptions {
  std::size_t random_restarts = 4;
  // Softmax logit given to the hot coordinate of a vertex start.
  double vertex_logit = 6.0;
  NelderMeadOptions nelder_mead{};
};

struct WeightOptimization {
  std::vector<double> weights;  // normalized
  double loss = 0.0;
  std::vector<double> member_losses;
  std::size_t best_start = 0;
};

// Minimizes soft-vote log loss over the weight simplex. Candidates are every
// one-hot vertex and the uniform centre (evaluated exactly) plus Nelder-Mead
// runs in softmax coordinates started from each of them and from seeded
// random points; the lowest loss wins, ties to the earliest candidate.
WeightOptimization optimize_weights(const Matrix& member_probas, std::span<const int> labels,
                                    std::uint64_t seed, const WeightOptimizerOptions& options = {});
WeightOptimization optimize_weights(const std::vector<TrainedModel>& members, const Dataset& data,
                                    std::uint64_t seed, const WeightOptimizerOptions& options = {});

struct MemberReport {
  ModelKind kind;
  CvResult result;
};

// Drops excluded kinds, ranks the rest by mean validation log loss (ties keep
// report order) and returns at most `count`.
std::vector<ModelKind> select_members(const std::vector<MemberReport>& reports,
                                      const std::vector<ModelKind>& exclude, std::size_t count = 3);

MetricReport evaluate_ensemble(const EnsembleModel& ensemble, const Dataset& test);

// Ensemble document: member model file references (relative paths as given),
// raw weights, threshold, schema version.
struct EnsembleDocument {
  std::vector<std::string> member_files;
  std::vector<double> weights;
  double threshold = kDefaultThreshold;
  std::uint64_t seed = 0;
};

std::string ensemble_to_json(const EnsembleDocument& doc);
EnsembleDocument ensemble_from_json(std::string_view text);

// Member paths are resolved relative to the document's directory.
void save_ensemble(const std::filesystem::path& path, const EnsembleDocument& doc);
EnsembleModel load_ensemble(const std::filesystem::path& path);

}  // namespace diabens
