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
#include <functional>
#include <span>
#include <vector>

namespace diabens {

struct NelderMeadOptions {
  double initial_step = 1.0;
  std::size_t max_evaluations = 4000;
  // Stop when the spread of simplex values and the simplex diameter both fall
  // below these.
  double f_tolerance = 1e-12;
  double x_tolerance = 1e-9;
  double reflection = 1.0;
  double expansion = 2.0;
  double contraction = 0.5;
  double shrink = 0.5;
};

struct NelderMeadResult {
  std::vector<double> x;
  double value = 0.0;
  std::size_t evaluations = 0;
  bool converged = false;
};

using Objective1D = std::function<double(std::span<const double>)>;

// Unconstrained minimization from an axis-aligned initial simplex around
// `start`. Never returns a point worse than `start`.
NelderMeadResult nelder_mead(const Objective1D& f, std::vector<double> start,
                             const NelderMeadOptions& options = {});

}  // namespace diabens
