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

#include <cmath>
#include <numeric>

#include "diabens/error.hpp"
#include "diabens/models.hpp"
#include "diabens/random.hpp"

namespace diabens {

double sigmoid(double z) {
  if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

double LinearSvmModel::decision(std::span<const double> x) const {
  double s = bias;
  for (std::size_t j = 0; j < weights.size(); ++j) s += weights[j] * x[j];
  return s;
}

double LinearSvmModel::predict_proba(std::span<const double> x) const {
  return sigmoid(platt_scale * decision(x) + platt_offset);
}

PlattParams fit_platt(std::span<const double> scores, std::span<const int> labels) {
  // Newton's method with backtracking on the smoothed-target likelihood, in
  // the classical parameterization p = 1 / (1 + exp(A s + B)).
  double prior1 = 0.0;
  double prior0 = 0.0;
  for (int y : labels) (y == 1 ? prior1 : prior0) += 1.0;
  const double hi_target = (prior1 + 1.0) / (prior1 + 2.0);
  const double lo_target = 1.0 / (prior0 + 2.0);
  std::vector<double> t(labels.size());
  for (std::size_t i = 0; i < labels.size(); ++i) t[i] = labels[i] == 1 ? hi_target : lo_target;

  auto objective = [&](double a, double b) {
    double f = 0.0;
    for (std::size_t i = 0; i < scores.size(); ++i) {
      const double z = scores[i] * a + b;
      f += z >= 0.0 ? t[i] * z + std::log1p(std::exp(-z)) : (t[i] - 1.0) * z + std::log1p(std::exp(z));
    }
    return f;
  };

  double a = 0.0;
  double b = std::log((prior0 + 1.0) / (prior1 + 1.0));
  double fval = objective(a, b);
  constexpr double kSigma = 1e-12;
  for (int iter = 0; iter < 100; ++iter) {
    double h11 = kSigma, h22 = kSigma, h21 = 0.0, g1 = 0.0, g2 = 0.0;
    for (std::size_t i = 0; i < scores.size(); ++i) {
      const double z = scores[i] * a + b;
      double p = 0.0;
      double q = 0.0;
      if (z >= 0.0) {
        const double e = std::exp(-z);
        p = e / (1.0 + e);
        q = 1.0 / (1.0 + e);
      } else {
        const double e = std::exp(z);
        p = 1.0 / (1.0 + e);
        q = e / (1.0 + e);
      }
      const double d2 = p * q;
      h11 += scores[i] * scores[i] * d2;
      h22 += d2;
      h21 += scores[i] * d2;
      const double d1 = t[i] - p;
      g1 += scores[i] * d1;
      g2 += d1;
    }
    if (std::abs(g1) < 1e-5 && std::abs(g2) < 1e-5) break;
    const double det = h11 * h22 - h21 * h21;
    const double da = -(h22 * g1 - h21 * g2) / det;
    const double db = -(-h21 * g1 + h11 * g2) / det;
    const double gd = g1 * da + g2 * db;
    double step = 1.0;
    while (step >= 1e-10) {
      const double na = a + step * da;
      const double nb = b + step * db;
      const double nf = objective(na, nb);
      if (nf < fval + 1e-4 * step * gd) {
        a = na;
        b = nb;
        fval = nf;
        break;
      }
      step /= 2.0;
    }
    if (step < 1e-10) break;
  }
  return {-a, -b};
}

LinearSvmModel train_linear_svm(const Dataset& train, const SvmOptions& options) {
  validate(train);
  if (!(options.c > 0.0)) throw_usage("SVM C must be positive");
  if (options.epochs < 1) throw_usage("SVM epochs must be at least 1");
  if (train.count_label(0) == 0 || train.count_label(1) == 0) {
    throw_data("linear SVM needs both classes in the training data");
  }
  const std::size_t n = train.rows();
  const std::size_t d = train.cols();
  // Pegasos with the bias folded in as a constant feature.
  const double lambda = 1.0 / (options.c * static_cast<double>(n));
  const double radius = 1.0 / std::sqrt(lambda);
  std::vector<double> w(d + 1, 0.0);
  std::vector<double> avg(d + 1, 0.0);
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  Rng rng(options.seed);
  std::uint64_t t = 0;
  for (int epoch = 0; epoch < options.epochs; ++epoch) {
    rng.shuffle(order);
    const bool last = epoch + 1 == options.epochs;
    for (auto i : order) {
      ++t;
      const double eta = 1.0 / (lambda * static_cast<double>(t));
      const auto x = train.features.row(i);
      const double y = train.labels[i] == 1 ? 1.0 : -1.0;
      double score = w[d];
      for (std::size_t j = 0; j < d; ++j) score += w[j] * x[j];
      const double shrink = 1.0 - eta * lambda;
      for (auto& v : w) v *= shrink;
      if (y * score < 1.0) {
        for (std::size_t j = 0; j < d; ++j) w[j] += eta * y * x[j];
        w[d] += eta * y;
      }
      double norm = 0.0;
      for (double v : w) norm += v * v;
      norm = std::sqrt(norm);
      if (norm > radius) {
        for (auto& v : w) v *= radius / norm;
      }
      if (last) {
        for (std::size_t j = 0; j <= d; ++j) avg[j] += w[j];
      }
    }
  }
  for (auto& v : avg) v /= static_cast<double>(n);

  LinearSvmModel model;
  model.weights.assign(avg.begin(), avg.begin() + static_cast<std::ptrdiff_t>(d));
  model.bias = avg[d];
  std::vector<double> scores(n);
  for (std::size_t i = 0; i < n; ++i) scores[i] = model.decision(train.features.row(i));
  const auto platt = fit_platt(scores, train.labels);
  model.platt_scale = platt.scale;
  model.platt_offset = platt.offset;
  return model;
}

}  // namespace diabens
