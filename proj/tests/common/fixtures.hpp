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

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "diabens/dataset.hpp"
#include "diabens/random.hpp"

namespace fixtures {

inline diabens::Dataset make(const std::vector<std::vector<double>>& rows, const std::vector<int>& labels) {
  diabens::Dataset d;
  d.features = diabens::Matrix::from_rows(rows);
  d.labels = labels;
  const std::size_t cols = rows.empty() ? 0 : rows.front().size();
  for (std::size_t c = 0; c < cols; ++c) d.feature_names.push_back("f" + std::to_string(c));
  return d;
}

// Two Gaussian clouds centred at -sep/2 and +sep/2 on every axis.
inline diabens::Dataset blobs(std::size_t n, std::size_t d, double sep, std::uint64_t seed) {
  diabens::Rng rng(seed);
  std::vector<std::vector<double>> rows;
  std::vector<int> labels;
  for (std::size_t i = 0; i < n; ++i) {
    const int y = static_cast<int>(i % 2);
    std::vector<double> r(d);
    for (auto& v : r) v = rng.normal(y ? sep / 2 : -sep / 2, 1.0);
    rows.push_back(std::move(r));
    labels.push_back(y);
  }
  return make(rows, labels);
}

inline diabens::Dataset random_dataset(std::size_t n, std::size_t d, std::uint64_t seed) {
  diabens::Rng rng(seed);
  std::vector<std::vector<double>> rows;
  std::vector<int> labels;
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<double> r(d);
    for (auto& v : r) v = rng.normal();
    rows.push_back(std::move(r));
    labels.push_back(i < 2 ? static_cast<int>(i) : (rng.bernoulli(0.5) ? 1 : 0));
  }
  return make(rows, labels);
}

inline diabens::Dataset xor4() {
  return make({{0, 0}, {0, 1}, {1, 0}, {1, 1}}, {0, 1, 1, 0});
}

// Fresh empty directory under the system temp dir.
inline std::filesystem::path temp_dir(const std::string& name) {
  const auto p = std::filesystem::temp_directory_path() / ("diabens_unit_" + name);
  std::filesystem::remove_all(p);
  std::filesystem::create_directories(p);
  return p;
}

inline double accuracy(const std::vector<int>& pred, const std::vector<int>& actual) {
  std::size_t ok = 0;
  for (std::size_t i = 0; i < pred.size(); ++i) ok += pred[i] == actual[i] ? 1 : 0;
  return static_cast<double>(ok) / static_cast<double>(pred.size());
}

}  // namespace fixtures
