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
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "diabens/matrix.hpp"

namespace diabens {

// Feature matrix + binary labels + column names. Missing cells are NaN and
// only exist between zeros_to_missing() and impute_mean().
struct Dataset {
  Matrix features;
  std::vector<int> labels;
  std::vector<std::string> feature_names;

  std::size_t rows() const noexcept { return features.rows(); }
  std::size_t cols() const noexcept { return features.cols(); }

  // Index of a named feature; throws a usage error for unknown names.
  std::size_t column_index(const std::string& name) const;
  bool has_missing() const;
  std::size_t count_label(int label) const;

  friend bool operator==(const Dataset&, const Dataset&) = default;
};

// Validates the structural invariants (label count, name count, labels in
// {0,1}). Throws a data error describing the first violation.
void validate(const Dataset& data);

Dataset subset(const Dataset& data, std::span<const std::size_t> rows);

// --------------------------------------------------------------------------
// CSV ingestion

struct CsvSchema {
  std::string label_column;
  // Empty means every column other than the label, in file order.
  std::vector<std::string> feature_columns;
};

Dataset load_csv_dataset(const std::filesystem::path& path, const CsvSchema& schema);

// Writes a header row of feature names plus `label_column`, then one row per
// sample. Values use shortest round-trip formatting, so a reload is exact.
void write_csv_dataset(const std::filesystem::path& path, const Dataset& data,
                       const std::string& label_column = "label");

// --------------------------------------------------------------------------
// Missing values

struct GapReport {
  Dataset data;
  std::vector<std::string> warnings;
};

GapReport zeros_to_missing(const Dataset& data, const std::vector<std::string>& columns);

struct ImputationParams {
  std::vector<double> fill_values;
};

ImputationParams fit_imputer(const Dataset& train);
Dataset apply_imputer(const ImputationParams& params, const Dataset& data);

// Missing cells of `apply_to` take the per-column mean of the non-missing
// cells of `train`.
Dataset impute_mean(const Dataset& train, const Dataset& apply_to);

// --------------------------------------------------------------------------
// Standardization (population variance)

struct StandardizerParams {
  std::vector<double> mean;
  std::vector<double> stddev;        // always > 0; 1.0 for constant features
  std::vector<bool> constant;        // zero-spread features, mapped to 0
};

struct FittedStandardizer {
  StandardizerParams params;
  std::vector<std::string> warnings;
};

FittedStandardizer fit_standardizer(const Dataset& train);
Dataset apply_standardizer(const StandardizerParams& params, const Dataset& data);

// --------------------------------------------------------------------------
// Splitting

struct SplitIndices {
  std::vector<std::size_t> train;
  std::vector<std::size_t> test;
};

// Stratified by label; both index lists ascending.
SplitIndices stratified_split_indices(std::span<const int> labels, double test_fraction,
                                      std::uint64_t seed);

std::pair<Dataset, Dataset> train_test_split(const Dataset& data, double test_fraction,
                                             std::uint64_t seed);

// --------------------------------------------------------------------------
// Longitudinal vitals

struct RawVitalsRecord {
  std::string patient_id;
  std::string visit_date;  // ISO-8601 yyyy-mm-dd
  double weight = 0.0;
  double height = 0.0;
  double bmi = 0.0;
  double systolic_bp = 0.0;
  double diastolic_bp = 0.0;

  friend bool operator==(const RawVitalsRecord&, const RawVitalsRecord&) = default;
};

struct Demographics {
  std::string patient_id;
  double age = 0.0;
  int gender = 0;  // 0 = male, 1 = female
  int label = 0;   // 1 = diabetic

  friend bool operator==(const Demographics&, const Demographics&) = default;
};

inline constexpr std::size_t kVitalMeasureCount = 5;
inline constexpr std::size_t kPatientFeatureCount = 2 + 3 * kVitalMeasureCount;

struct MeasureSummary {
  // NaN when the patient has no non-missing value for the measure.
  double min = 0.0;
  double max = 0.0;
  double mean = 0.0;
};

struct PatientFeatureVector {
  std::string patient_id;
  double age = 0.0;
  int gender = 0;
  // weight, height, bmi, systolic_bp, diastolic_bp
  MeasureSummary measures[kVitalMeasureCount];
  int label = 0;

  // age, gender, then min/max/mean for each measure.
  std::vector<double> to_features() const;
};

// Names of the 17 aggregated features, in to_features() order.
const std::vector<std::string>& patient_feature_names();
const std::vector<std::string>& vital_measure_names();

// One vector per demographics entry, in demographics order. Exact-zero vitals
// are treated as missing before min/max/mean are taken.
std::vector<PatientFeatureVector> aggregate_vitals(const std::vector<RawVitalsRecord>& records,
                                                   const std::vector<Demographics>& demographics);

Dataset to_dataset(const std::vector<PatientFeatureVector>& patients);

std::vector<RawVitalsRecord> read_vitals_csv(const std::filesystem::path& path);
std::vector<Demographics> read_demographics_csv(const std::filesystem::path& path);
void write_vitals_csv(const std::filesystem::path& path, const std::vector<RawVitalsRecord>& records);
void write_demographics_csv(const std::filesystem::path& path, const std::vector<Demographics>& demographics);

struct SyntheticVitals {
  std::vector<RawVitalsRecord> records;
  std::vector<Demographics> demographics;
};

// Schema-compatible stand-in for the non-redistributable EHR extract. See
// dataset.cpp for the generating distributions.
SyntheticVitals generate_synthetic_vitals(std::size_t n_patients, std::uint64_t seed);

}  // namespace diabens
