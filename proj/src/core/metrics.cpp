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

#include "diabens/metrics.hpp"

#include <algorithm>
#include <cmath>

#include "diabens/csv.hpp"
#include "diabens/error.hpp"

namespace diabens {

namespace {

MetricValue ratio(std::uint64_t num, std::uint64_t den) {
  if (den == 0) return std::nullopt;
  return static_cast<double>(num) / static_cast<double>(den);
}

}  // namespace

std::array<MetricValue, 6> MetricReport::values() const {
  return {accuracy, precision, negative_predictive_value, sensitivity, specificity, f1};
}

ConfusionMatrix confusion_matrix(std::span<const int> predicted, std::span<const int> actual) {
  if (predicted.size() != actual.size()) {
    throw_usage("confusion matrix: " + std::to_string(predicted.size()) + " predictions vs " +
                std::to_string(actual.size()) + " labels");
  }
  if (predicted.empty()) throw_usage("confusion matrix: no samples");
  ConfusionMatrix cm;
  for (std::size_t i = 0; i < predicted.size(); ++i) {
    const int p = predicted[i];
    const int a = actual[i];
    if ((p != 0 && p != 1) || (a != 0 && a != 1)) {
      throw_usage("confusion matrix: non-binary value at index " + std::to_string(i));
    }
    if (p == 1) {
      a == 1 ? ++cm.tp : ++cm.fp;
    } else {
      a == 0 ? ++cm.tn : ++cm.fn;
    }
  }
  return cm;
}

MetricReport metric_suite(const ConfusionMatrix& cm) {
  MetricReport r;
  r.accuracy = ratio(cm.tp + cm.tn, cm.total());
  r.precision = ratio(cm.tp, cm.tp + cm.fp);
  r.negative_predictive_value = ratio(cm.tn, cm.tn + cm.fn);
  r.sensitivity = ratio(cm.tp, cm.tp + cm.fn);
  r.specificity = ratio(cm.tn, cm.tn + cm.fp);
  if (r.precision && r.sensitivity) {
    const double p = *r.precision;
    const double s = *r.sensitivity;
    r.f1 = p + s > 0.0 ? 2.0 * p * s / (p + s) : 0.0;
  }
  return r;
}

double log_loss(std::span<const double> probabilities, std::span<const int> actual,
                double clip_epsilon) {
  if (probabilities.size() != actual.size()) {
    throw_usage("log loss: " + std::to_string(probabilities.size()) + " probabilities vs " +
                std::to_string(actual.size()) + " labels");
  }
  if (probabilities.empty()) throw_usage("log loss: no samples");
  if (!(clip_epsilon > 0.0 && clip_epsilon < 0.5)) throw_usage("log loss: clip epsilon must lie in (0, 0.5)");
  double sum = 0.0;
  for (std::size_t i = 0; i < probabilities.size(); ++i) {
    const double p = std::clamp(probabilities[i], clip_epsilon, 1.0 - clip_epsilon);
    sum -= actual[i] == 1 ? std::log(p) : std::log1p(-p);
  }
  return sum / static_cast<double>(probabilities.size());
}

std::string format_metric(const MetricValue& value, int decimals) {
  return value ? csv::format_fixed(*value, decimals) : std::string("n/a");
}

std::string metric_csv_fields(const MetricReport& report, int decimals) {
  std::string out;
  for (const auto& v : report.values()) {
    if (!out.empty()) out.push_back(',');
    out += format_metric(v, decimals);
  }
  return out;
}

std::string metric_csv_header() {
  std::string out;
  for (auto name : kMetricNames) {
    if (!out.empty()) out.push_back(',');
    out += name;
  }
  return out;
}

}  // namespace diabens
