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

#include "diabens/error.hpp"
#include "diabens/models.hpp"

namespace diabens {

KnnModel train_knn(const Dataset& train, int k) {
  validate(train);
  if (k < 1) throw_usage("k must be at least 1");
  if (static_cast<std::size_t>(k) > train.rows()) {
    throw_usage("k = " + std::to_string(k) + " exceeds the " + std::to_string(train.rows()) +
                " training rows");
  }
  return {train.features, train.labels, k};
}

std::vector<std::size_t> KnnModel::neighbours(std::span<const double> x) const {
  std::vector<std::pair<double, std::size_t>> dist(points.rows());
  for (std::size_t i = 0; i < points.rows(); ++i) {
    const auto p = points.row(i);
    double d = 0.0;
    for (std::size_t j = 0; j < p.size(); ++j) {
      const double diff = p[j] - x[j];
      d += diff * diff;
    }
    dist[i] = {d, i};
  }
  const auto kk = static_cast<std::size_t>(k);
  std::partial_sort(dist.begin(), dist.begin() + static_cast<std::ptrdiff_t>(kk), dist.end());
  std::vector<std::size_t> out(kk);
  for (std::size_t i = 0; i < kk; ++i) out[i] = dist[i].second;
  return out;
}

double KnnModel::predict_proba(std::span<const double> x) const {
  std::size_t positives = 0;
  for (auto i : neighbours(x)) positives += labels[i] == 1 ? 1 : 0;
  return static_cast<double>(positives) / static_cast<double>(k);
}

}  // namespace diabens
