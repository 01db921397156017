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

namespace diabens {

struct ConfusionMatrix {
  std::uint64_t tp = 0;
  std::uint64_t fp = 0;
  std::uint64_t tn = 0;
  std::uint64_t fn = 0;

  std::uint64_t total() const noexcept { return tp + fp + tn + fn; }
  friend bool operator==(const ConfusionMatrix&, const ConfusionMatrix&) = default;
};

// An unset optional is the undefined marker (0/0 denominator).
using MetricValue = std::optional<double>;

struct MetricReport {
  MetricValue accuracy;
  MetricValue precision;
  MetricValue negative_predictive_value;
  MetricValue sensitivity;
  MetricValue specificity;
  MetricValue f1;

  // In table column order: Accuracy, Precision, Negative Prediction,
  // Sensitivity, Specificity, F1-Score.
  std::array<MetricValue, 6> values() const;
};

inline constexpr std::array<std::string_view, 6> kMetricNames = {
    "accuracy", "precision", "negative_prediction", "sensitivity", "specificity", "f1_score"};

inline constexpr std::array<std::string_view, 6> kMetricTitles = {
    "Accuracy", "Precision", "Negative Prediction", "Sensitivity", "Specificity", "F1-Score"};

ConfusionMatrix confusion_matrix(std::span<const int> predicted, std::span<const int> actual);

MetricReport metric_suite(const ConfusionMatrix& cm);

inline constexpr double kDefaultClipEpsilon = 1e-15;

// Mean binary cross-entropy with probabilities clipped to [eps, 1 - eps].
double log_loss(std::span<const double> probabilities, std::span<const int> actual,
                double clip_epsilon = kDefaultClipEpsilon);

// "n/a" for undefined, otherwise fixed with 4 decimals.
std::string format_metric(const MetricValue& value, int decimals = 4);

// Comma-joined metric values in table column order.
std::string metric_csv_fields(const MetricReport& report, int decimals = 4);

// Header fragment matching metric_csv_fields().
std::string metric_csv_header();

}  // namespace diabens
