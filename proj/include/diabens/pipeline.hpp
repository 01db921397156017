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

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "diabens/ensemble.hpp"
#include "diabens/model.hpp"

namespace diabens {

// Everything a command needs. Filled from key=value pairs (config file first,
// then command-line flags) through set_config_value().
struct RunConfig {
  // prepare
  std::filesystem::path input;         // single-table CSV
  std::filesystem::path vitals;        // vitals + demographics pair
  std::filesystem::path demographics;
  std::string label_column = "Outcome";
  std::vector<std::string> feature_columns;
  std::vector<std::string> zero_missing_columns;  // single-table only
  double test_fraction = 0.25;
  bool paper_faithful = false;

  // synth
  std::size_t patients = 2000;

  // shared
  std::uint64_t seed = 0;
  std::filesystem::path out_dir = "out";
  std::size_t folds = 5;

  // train / cv
  std::string kind;
  HyperParams params;
  double threshold = kDefaultThreshold;
  std::vector<std::string> grid;  // "key=v1,v2" or "key=lo..hi"
  std::string objective = "accuracy";

  // ensemble
  std::vector<std::string> exclude{"nb"};
  std::size_t member_count = 3;
  std::vector<std::string> members;   // explicit list skips selection
  std::vector<double> weights;        // explicit weights skip optimization
  double validation_fraction = 0.2;
  std::filesystem::path from;         // evaluate a saved ensemble instead
};

// Recognized keys are listed in config_keys(). Unknown keys and unparseable
// values are usage errors.
void set_config_value(RunConfig& config, std::string_view key, std::string_view value);
const std::vector<std::string>& config_keys();

// key=value lines; '#' starts a comment; blank lines ignored.
void apply_config_text(RunConfig& config, std::string_view text);
void apply_config_file(RunConfig& config, const std::filesystem::path& path);

using LogSink = std::function<void(std::string_view)>;

// Artifact file names inside out_dir.
namespace artifacts {
inline constexpr const char* kTrain = "train.csv";
inline constexpr const char* kTest = "test.csv";
inline constexpr const char* kProvenance = "provenance.json";
inline constexpr const char* kReport = "report.csv";
inline constexpr const char* kEnsembleReport = "ensemble_report.csv";
inline constexpr const char* kEnsembleWeights = "ensemble_weights.csv";
inline constexpr const char* kEnsemble = "ensemble.json";
inline constexpr const char* kComparisonCsv = "comparison.csv";
inline constexpr const char* kComparisonLongCsv = "comparison_long.csv";
inline constexpr const char* kComparisonTxt = "comparison.txt";
inline constexpr const char* kModelsDir = "models";
inline constexpr const char* kSynthVitals = "vitals.csv";
inline constexpr const char* kSynthDemographics = "demographics.csv";
}  // namespace artifacts

// Writes synthetic vitals + demographics CSVs into out_dir.
void cmd_synth(const RunConfig& config, const LogSink& log);

// Loads raw input, applies zero->missing, splits, imputes, standardizes and
// writes train.csv, test.csv and provenance.json.
void cmd_prepare(const RunConfig& config, const LogSink& log);

// Trains config.kind on train.csv, evaluates on test.csv, saves
// models/<kind>.json and appends a row to report.csv.
void cmd_train(const RunConfig& config, const LogSink& log);

// Grid search for config.kind on train.csv; writes cv_<kind>.csv and one
// curve_<kind>_<key>.csv per swept key.
void cmd_cv(const RunConfig& config, const LogSink& log);

// Selects members, optimizes weights on a validation carve-out of the
// training split, evaluates on the test split.
// The ensemble step without artifacts: carves a validation part out of
// `train` (already preprocessed), picks members by cross-validated log loss
// unless config.members is set, fits them on the rest and weights them on
// the validation part.
struct EnsembleBuild {
  std::vector<TrainedModel> members;
  WeightOptimization optimization;  // validation losses, normalized weights
  std::vector<double> raw_weights;
};
EnsembleBuild build_ensemble(const RunConfig& config, const Dataset& train, const LogSink& log);

void cmd_ensemble(const RunConfig& config, const LogSink& log);

// Merges report.csv and ensemble_report.csv into comparison tables.
void cmd_report(const RunConfig& config, const LogSink& log);

}  // namespace diabens
