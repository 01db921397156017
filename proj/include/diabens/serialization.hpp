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

#include <filesystem>
#include <string>
#include <string_view>

#include "diabens/model.hpp"

namespace diabens {

inline constexpr int kSchemaVersion = 1;

// Versioned JSON document holding the kind, hyperparameters, learned state,
// feature names and (optionally) the standardizer. Doubles are written in
// shortest round-trip form, so predictions after a reload are bit-identical.
std::string model_to_json(const TrainedModel& model);
TrainedModel model_from_json(std::string_view text);

void save_model(const std::filesystem::path& path, const TrainedModel& model);
TrainedModel load_model(const std::filesystem::path& path);

}  // namespace diabens
