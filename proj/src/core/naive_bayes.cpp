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

#include <algorithm>
#include <cmath>
#include <numbers>

#include "diabens/error.hpp"
#include "diabens/models.hpp"

namespace diabens {

std::array<double, 2> GaussianNbModel::log_joint(std::span<const double> x) const {
  std::array<double, 2> out{};
  for (int c = 0; c < 2; ++c) {
    double l = log_prior[c];
    for (std::size_t j = 0; j < x.size(); ++j) {
      const double var = variance[c][j];
      const double diff = x[j] - mean[c][j];
      l -= 0.5 * std::log(2.0 * std::numbers::pi * var) + diff * diff / (2.0 * var);
    }
    out[c] = l;
  }
  return out;
}

std::array<double, 2> GaussianNbModel::posterior(std::span<const double> x) const {
  const auto l = log_joint(x);
  const double m = std::max(l[0], l[1]);
  const double e0 = std::exp(l[0] - m);
  const double e1 = std::exp(l[1] - m);
  return {e0 / (e0 + e1), e1 / (e0 + e1)};
}

double GaussianNbModel::predict_proba(std::span<const double> x) const { return posterior(x)[1]; }

GaussianNbModel train_gaussian_nb(const Dataset& train, double var_floor) {
  validate(train);
  if (!(var_floor > 0.0)) throw_usage("naive Bayes variance floor must be positive");
  const std::size_t n = train.rows();
  const std::size_t d = train.cols();
  const std::array<std::size_t, 2> counts = {train.count_label(0), train.count_label(1)};
  if (counts[0] == 0 || counts[1] == 0) throw_data("naive Bayes needs both classes in the training data");

  // Largest overall feature variance sets the scale of the floor.
  double max_var = 0.0;
  for (std::size_t j = 0; j < d; ++j) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += train.features(i, j);
    const double m = s / static_cast<double>(n);
    double ss = 0.0;
    for (std::size_t i = 0; i < n; ++i) ss += (train.features(i, j) - m) * (train.features(i, j) - m);
    max_var = std::max(max_var, ss / static_cast<double>(n));
  }
  const double floor = max_var > 0.0 ? var_floor * max_var : var_floor;

  GaussianNbModel model;
  for (int c = 0; c < 2; ++c) {
    const double nc = static_cast<double>(counts[static_cast<std::size_t>(c)]);
    model.log_prior[c] = std::log(nc / static_cast<double>(n));
    model.mean[c].assign(d, 0.0);
    model.variance[c].assign(d, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
      if (train.labels[i] != c) continue;
      for (std::size_t j = 0; j < d; ++j) model.mean[c][j] += train.features(i, j);
    }
    for (auto& m : model.mean[c]) m /= nc;
    for (std::size_t i = 0; i < n; ++i) {
      if (train.labels[i] != c) continue;
      for (std::size_t j = 0; j < d; ++j) {
        const double diff = train.features(i, j) - model.mean[c][j];
        model.variance[c][j] += diff * diff;
      }
    }
    for (auto& v : model.variance[c]) v = std::max(v / nc, floor);
  }
  return model;
}

}  // namespace diabens
