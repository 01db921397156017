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

#include "diabens/model_selection.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "diabens/error.hpp"
#include "diabens/random.hpp"

namespace diabens {

namespace {

MetricSummary summarize(const std::vector<double>& values) {
  MetricSummary s;
  if (values.empty()) return s;
  double sum = 0.0;
  for (double v : values) sum += v;
  const double mean = sum / static_cast<double>(values.size());
  double ss = 0.0;
  for (double v : values) ss += (v - mean) * (v - mean);
  const auto [lo, hi] = std::minmax_element(values.begin(), values.end());
  // Rounding in the sum can push the mean a hair outside [min, max].
  s.mean = std::clamp(mean, *lo, *hi);
  s.stddev = std::sqrt(ss / static_cast<double>(values.size()));
  s.min = *lo;
  s.max = *hi;
  return s;
}

}  // namespace

FoldIndices stratified_k_fold(std::span<const int> labels, std::size_t folds, std::uint64_t seed) {
  if (folds < 2) throw_usage("cross-validation needs at least 2 folds");
  Rng rng(seed);
  FoldIndices out(folds);
  std::size_t offset = 0;
  for (int cls : {0, 1}) {
    std::vector<std::size_t> idx;
    for (std::size_t i = 0; i < labels.size(); ++i) {
      if (labels[i] == cls) idx.push_back(i);
    }
    if (idx.size() < folds) {
      throw_data("class " + std::to_string(cls) + " has " + std::to_string(idx.size()) +
                 " rows, fewer than the " + std::to_string(folds) + " folds requested");
    }
    rng.shuffle(idx);
    for (std::size_t i = 0; i < idx.size(); ++i) out[(offset + i) % folds].push_back(idx[i]);
    offset = (offset + idx.size()) % folds;
  }
  for (auto& f : out) std::sort(f.begin(), f.end());
  return out;
}

Preprocessor fit_preprocessor(const Dataset& train) {
  Preprocessor p;
  p.imputation = fit_imputer(train);
  p.standardizer = fit_standardizer(apply_imputer(p.imputation, train)).params;
  return p;
}

Dataset apply_preprocessor(const Preprocessor& prep, const Dataset& data) {
  return apply_standardizer(prep.standardizer, apply_imputer(prep.imputation, data));
}

CvResult cross_validate(const Dataset& data, const FitFn& fit, std::size_t folds, std::uint64_t seed) {
  validate(data);
  const FoldIndices fold_rows = stratified_k_fold(data.labels, folds, seed);
  CvResult result;
  std::array<std::vector<double>, 6> per_metric;
  for (std::size_t f = 0; f < folds; ++f) {
    try {
      std::vector<std::size_t> train_rows;
      for (std::size_t g = 0; g < folds; ++g) {
        if (g != f) train_rows.insert(train_rows.end(), fold_rows[g].begin(), fold_rows[g].end());
      }
      std::sort(train_rows.begin(), train_rows.end());
      const Dataset train_raw = subset(data, train_rows);
      const Dataset val_raw = subset(data, fold_rows[f]);
      Preprocessor prep = fit_preprocessor(train_raw);
      const Dataset train = apply_preprocessor(prep, train_raw);
      const Dataset val = apply_preprocessor(prep, val_raw);

      const ProbabilityFn predict = fit(train);
      const auto val_p = predict(val.features);
      std::vector<int> val_pred(val_p.size());
      for (std::size_t i = 0; i < val_p.size(); ++i) val_pred[i] = val_p[i] >= kDefaultThreshold ? 1 : 0;
      const auto report = metric_suite(confusion_matrix(val_pred, val.labels));
      const auto train_p = predict(train.features);
      std::vector<int> train_pred(train_p.size());
      for (std::size_t i = 0; i < train_p.size(); ++i) train_pred[i] = train_p[i] >= kDefaultThreshold ? 1 : 0;

      result.fold_reports.push_back(report);
      result.fold_log_loss.push_back(log_loss(val_p, val.labels));
      result.fold_train_accuracy.push_back(*metric_suite(confusion_matrix(train_pred, train.labels)).accuracy);
      result.fold_preprocessors.push_back(std::move(prep));
      const auto values = report.values();
      for (std::size_t m = 0; m < values.size(); ++m) {
        if (values[m]) per_metric[m].push_back(*values[m]);
      }
    } catch (const Error& e) {
      throw Error(e.kind(), "fold " + std::to_string(f + 1) + ": " + e.what());
    }
  }
  for (std::size_t m = 0; m < per_metric.size(); ++m) result.summary[m] = summarize(per_metric[m]);
  result.log_loss = summarize(result.fold_log_loss);
  result.train_accuracy = summarize(result.fold_train_accuracy);
  return result;
}

CvResult cross_validate(const Dataset& data, const ModelSpec& spec, std::size_t folds,
                        std::uint64_t seed) {
  validate(spec.params);
  const FitFn fit = [&spec](const Dataset& train) -> ProbabilityFn {
    TrainedModel model = train_model(spec.kind, train, spec.params);
    return [model = std::move(model)](const Matrix& x) { return model.predict_proba(x); };
  };
  CvResult r = cross_validate(data, fit, folds, seed);
  r.spec = spec;
  return r;
}

Objective parse_objective(std::string_view name) {
  if (name == "log_loss") return {"log_loss", -1, true};
  for (std::size_t i = 0; i < kMetricNames.size(); ++i) {
    if (kMetricNames[i] == name) return {std::string(name), static_cast<int>(i), false};
  }
  if (name == "f1") return {"f1_score", 5, false};
  if (name == "npv") return {"negative_prediction", 2, false};
  throw_usage("unknown objective '" + std::string(name) +
              "' (use accuracy, precision, negative_prediction, sensitivity, specificity, f1_score or log_loss)");
}

double objective_value(const CvResult& result, const Objective& objective) {
  const MetricSummary& s = objective.metric_index < 0
                               ? result.log_loss
                               : result.summary[static_cast<std::size_t>(objective.metric_index)];
  return s.mean ? *s.mean : std::numeric_limits<double>::quiet_NaN();
}

GridSearchResult grid_search(const Dataset& data, ModelKind kind, const std::vector<HyperParams>& grid,
                             std::size_t folds, std::uint64_t seed, std::string_view objective) {
  const Objective obj = parse_objective(objective);
  if (grid.empty()) throw_usage("grid search needs at least one configuration");
  GridSearchResult out;
  double best = std::numeric_limits<double>::quiet_NaN();
  for (std::size_t i = 0; i < grid.size(); ++i) {
    out.results.push_back(cross_validate(data, ModelSpec{kind, grid[i]}, folds, seed));
    const double v = objective_value(out.results.back(), obj);
    if (std::isnan(v)) continue;
    if (std::isnan(best) || (obj.minimize ? v < best : v > best)) {
      best = v;
      out.best_index = i;
    }
  }
  out.best = grid[out.best_index];
  return out;
}

std::vector<CurvePoint> error_curve(const std::vector<CvResult>& results, std::string_view key) {
  std::vector<CurvePoint> curve;
  for (const auto& r : results) {
    const std::string value = get_hyperparam(r.spec.params, key);
    const double cv_error = r.summary[0].mean ? 1.0 - *r.summary[0].mean : 1.0;
    const double train_error = r.train_accuracy.mean ? 1.0 - *r.train_accuracy.mean : 1.0;
    auto it = std::find_if(curve.begin(), curve.end(), [&](const CurvePoint& p) { return p.value == value; });
    if (it == curve.end()) {
      curve.push_back({value, train_error, cv_error});
    } else if (cv_error < it->cv_error) {
      it->train_error = train_error;
      it->cv_error = cv_error;
    }
  }
  return curve;
}

}  // namespace diabens
