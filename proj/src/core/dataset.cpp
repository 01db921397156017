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

#include "diabens/dataset.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <limits>
#include <map>
#include <unordered_map>

#include "diabens/csv.hpp"
#include "diabens/error.hpp"
#include "diabens/random.hpp"

namespace diabens {

namespace {

constexpr double kMissing = std::numeric_limits<double>::quiet_NaN();

std::size_t find_column(const std::vector<std::string>& header, const std::string& name,
                        const std::filesystem::path& path) {
  const auto it = std::find(header.begin(), header.end(), name);
  if (it == header.end()) throw_data(path.string() + ": missing column '" + name + "'");
  return static_cast<std::size_t>(it - header.begin());
}

double parse_cell(const csv::Table& table, std::size_t row, std::size_t col,
                  const std::filesystem::path& path) {
  double v = 0.0;
  if (!csv::parse_double(table.rows[row][col], v)) {
    throw_data(path.string() + ": line " + std::to_string(table.line_numbers[row]) + ", column '" +
               table.header[col] + "': cannot parse '" + table.rows[row][col] + "' as a number");
  }
  return v;
}

int parse_binary(double v, const csv::Table& table, std::size_t row, std::size_t col,
                 const std::filesystem::path& path) {
  if (v != 0.0 && v != 1.0) {
    throw_data(path.string() + ": line " + std::to_string(table.line_numbers[row]) + ", column '" +
               table.header[col] + "': expected 0 or 1");
  }
  return static_cast<int>(v);
}

}  // namespace

std::size_t Dataset::column_index(const std::string& name) const {
  const auto it = std::find(feature_names.begin(), feature_names.end(), name);
  if (it == feature_names.end()) throw_usage("unknown column '" + name + "'");
  return static_cast<std::size_t>(it - feature_names.begin());
}

bool Dataset::has_missing() const {
  return std::any_of(features.data().begin(), features.data().end(),
                     [](double v) { return std::isnan(v); });
}

std::size_t Dataset::count_label(int label) const {
  return static_cast<std::size_t>(std::count(labels.begin(), labels.end(), label));
}

void validate(const Dataset& data) {
  if (data.labels.size() != data.rows()) {
    throw_data("dataset has " + std::to_string(data.rows()) + " rows but " +
               std::to_string(data.labels.size()) + " labels");
  }
  if (data.feature_names.size() != data.cols()) {
    throw_data("dataset has " + std::to_string(data.cols()) + " columns but " +
               std::to_string(data.feature_names.size()) + " feature names");
  }
  for (int y : data.labels) {
    if (y != 0 && y != 1) throw_data("labels must be 0 or 1");
  }
}

Dataset subset(const Dataset& data, std::span<const std::size_t> rows) {
  Dataset out;
  out.feature_names = data.feature_names;
  out.features = Matrix(rows.size(), data.cols());
  out.labels.reserve(rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto src = data.features.row(rows[i]);
    std::copy(src.begin(), src.end(), out.features.row(i).begin());
    out.labels.push_back(data.labels[rows[i]]);
  }
  return out;
}

Dataset load_csv_dataset(const std::filesystem::path& path, const CsvSchema& schema) {
  if (schema.label_column.empty()) throw_usage("schema needs a label column");
  const csv::Table table = csv::read(path);
  const std::size_t label_col = find_column(table.header, schema.label_column, path);

  std::vector<std::string> names = schema.feature_columns;
  if (names.empty()) {
    for (const auto& h : table.header) {
      if (h != schema.label_column) names.push_back(h);
    }
  }
  if (names.empty()) throw_usage(path.string() + ": no feature columns");
  std::vector<std::size_t> cols;
  for (const auto& n : names) cols.push_back(find_column(table.header, n, path));
  if (table.rows.empty()) throw_data(path.string() + ": no data rows");

  Dataset data;
  data.feature_names = names;
  data.features = Matrix(table.rows.size(), cols.size());
  data.labels.resize(table.rows.size());
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    for (std::size_t c = 0; c < cols.size(); ++c) data.features(r, c) = parse_cell(table, r, cols[c], path);
    data.labels[r] = parse_binary(parse_cell(table, r, label_col, path), table, r, label_col, path);
  }
  return data;
}

void write_csv_dataset(const std::filesystem::path& path, const Dataset& data,
                       const std::string& label_column) {
  validate(data);
  std::vector<std::string> header = data.feature_names;
  header.push_back(label_column);
  std::string out = csv::join(header) + "\n";
  for (std::size_t r = 0; r < data.rows(); ++r) {
    for (double v : data.features.row(r)) {
      if (std::isnan(v)) throw_data("refusing to serialize a missing cell; impute first");
      out += csv::format_double(v);
      out.push_back(',');
    }
    out += std::to_string(data.labels[r]);
    out.push_back('\n');
  }
  csv::write_text(path, out);
}

GapReport zeros_to_missing(const Dataset& data, const std::vector<std::string>& columns) {
  GapReport report{data, {}};
  for (const auto& name : columns) {
    const std::size_t c = data.column_index(name);
    std::size_t zeros = 0;
    for (std::size_t r = 0; r < data.rows(); ++r) {
      if (report.data.features(r, c) == 0.0) {
        report.data.features(r, c) = kMissing;
        ++zeros;
      }
    }
    if (zeros == data.rows() && zeros > 0) {
      report.warnings.push_back("column '" + name + "' is all zero; every cell is now missing");
    }
  }
  return report;
}

ImputationParams fit_imputer(const Dataset& train) {
  ImputationParams params;
  params.fill_values.resize(train.cols());
  for (std::size_t c = 0; c < train.cols(); ++c) {
    double sum = 0.0;
    std::size_t count = 0;
    for (std::size_t r = 0; r < train.rows(); ++r) {
      const double v = train.features(r, c);
      if (!std::isnan(v)) {
        sum += v;
        ++count;
      }
    }
    if (count == 0) {
      throw_data("column '" + train.feature_names[c] + "' has no observed values in the training data");
    }
    params.fill_values[c] = sum / static_cast<double>(count);
  }
  return params;
}

Dataset apply_imputer(const ImputationParams& params, const Dataset& data) {
  if (params.fill_values.size() != data.cols()) throw_usage("imputer column count mismatch");
  Dataset out = data;
  for (std::size_t r = 0; r < out.rows(); ++r) {
    for (std::size_t c = 0; c < out.cols(); ++c) {
      if (std::isnan(out.features(r, c))) out.features(r, c) = params.fill_values[c];
    }
  }
  return out;
}

Dataset impute_mean(const Dataset& train, const Dataset& apply_to) {
  return apply_imputer(fit_imputer(train), apply_to);
}

FittedStandardizer fit_standardizer(const Dataset& train) {
  if (train.rows() < 2) throw_data("standardizer needs at least 2 training rows");
  if (train.has_missing()) throw_data("standardizer input has missing cells; impute first");
  FittedStandardizer fitted;
  auto& p = fitted.params;
  const std::size_t d = train.cols();
  const double n = static_cast<double>(train.rows());
  p.mean.assign(d, 0.0);
  p.stddev.assign(d, 1.0);
  p.constant.assign(d, false);
  for (std::size_t c = 0; c < d; ++c) {
    double sum = 0.0;
    for (std::size_t r = 0; r < train.rows(); ++r) sum += train.features(r, c);
    const double mean = sum / n;
    double ss = 0.0;
    for (std::size_t r = 0; r < train.rows(); ++r) {
      const double dv = train.features(r, c) - mean;
      ss += dv * dv;
    }
    const double sd = std::sqrt(ss / n);
    p.mean[c] = mean;
    if (sd <= 1e-12 * std::max(1.0, std::abs(mean))) {
      p.constant[c] = true;
      fitted.warnings.push_back("feature '" + train.feature_names[c] +
                                "' has zero variance; standardized to 0");
    } else {
      p.stddev[c] = sd;
    }
  }
  return fitted;
}

Dataset apply_standardizer(const StandardizerParams& params, const Dataset& data) {
  if (params.mean.size() != data.cols()) throw_usage("standardizer column count mismatch");
  Dataset out = data;
  for (std::size_t r = 0; r < out.rows(); ++r) {
    for (std::size_t c = 0; c < out.cols(); ++c) {
      double& v = out.features(r, c);
      v = params.constant[c] ? 0.0 : (v - params.mean[c]) / params.stddev[c];
    }
  }
  return out;
}

SplitIndices stratified_split_indices(std::span<const int> labels, double test_fraction,
                                      std::uint64_t seed) {
  if (!(test_fraction > 0.0 && test_fraction < 1.0)) throw_usage("test fraction must lie in (0, 1)");
  if (labels.size() < 2) throw_usage("split needs at least 2 rows");
  std::array<std::vector<std::size_t>, 2> by_class;
  for (std::size_t i = 0; i < labels.size(); ++i) by_class[labels[i] == 1 ? 1 : 0].push_back(i);
  for (int cls : {0, 1}) {
    if (by_class[cls].empty()) throw_data("class " + std::to_string(cls) + " has no rows; cannot stratify");
  }
  // The overall test size is rounded once, then shared out by largest
  // remainder so the totals come out exact (100 rows at 0.25 -> 75/25).
  const auto total = static_cast<std::size_t>(std::lround(test_fraction * static_cast<double>(labels.size())));
  std::array<std::size_t, 2> n_test{};
  std::array<double, 2> remainder{};
  for (int cls : {0, 1}) {
    const double exact = test_fraction * static_cast<double>(by_class[cls].size());
    n_test[cls] = static_cast<std::size_t>(std::floor(exact));
    remainder[cls] = exact - std::floor(exact);
  }
  for (std::size_t left = total - std::min(total, n_test[0] + n_test[1]); left > 0; --left) {
    const int cls = remainder[1] > remainder[0] ? 1 : 0;
    ++n_test[cls];
    remainder[cls] = -1.0;
  }

  Rng rng(seed);
  SplitIndices out;
  for (int cls : {0, 1}) {
    auto& idx = by_class[cls];
    rng.shuffle(idx);
    const auto cut = static_cast<std::ptrdiff_t>(n_test[cls]);
    out.test.insert(out.test.end(), idx.begin(), idx.begin() + cut);
    out.train.insert(out.train.end(), idx.begin() + cut, idx.end());
  }
  std::sort(out.train.begin(), out.train.end());
  std::sort(out.test.begin(), out.test.end());
  return out;
}

std::pair<Dataset, Dataset> train_test_split(const Dataset& data, double test_fraction,
                                             std::uint64_t seed) {
  validate(data);
  const auto idx = stratified_split_indices(data.labels, test_fraction, seed);
  return {subset(data, idx.train), subset(data, idx.test)};
}

// ---------------------------------------------------------------------------
// Longitudinal vitals

const std::vector<std::string>& vital_measure_names() {
  static const std::vector<std::string> names = {"weight", "height", "bmi", "systolic_bp",
                                                 "diastolic_bp"};
  return names;
}

const std::vector<std::string>& patient_feature_names() {
  static const std::vector<std::string> names = [] {
    std::vector<std::string> n = {"age", "gender"};
    for (const auto& m : vital_measure_names()) {
      n.push_back(m + "_min");
      n.push_back(m + "_max");
      n.push_back(m + "_mean");
    }
    return n;
  }();
  return names;
}

std::vector<double> PatientFeatureVector::to_features() const {
  std::vector<double> f = {age, static_cast<double>(gender)};
  for (const auto& m : measures) {
    f.push_back(m.min);
    f.push_back(m.max);
    f.push_back(m.mean);
  }
  return f;
}

namespace {

std::array<double, kVitalMeasureCount> measure_values(const RawVitalsRecord& r) {
  return {r.weight, r.height, r.bmi, r.systolic_bp, r.diastolic_bp};
}

}  // namespace

std::vector<PatientFeatureVector> aggregate_vitals(const std::vector<RawVitalsRecord>& records,
                                                   const std::vector<Demographics>& demographics) {
  std::unordered_map<std::string, std::vector<const RawVitalsRecord*>> visits;
  for (const auto& r : records) visits[r.patient_id].push_back(&r);

  std::vector<PatientFeatureVector> out;
  out.reserve(demographics.size());
  for (const auto& demo : demographics) {
    const auto it = visits.find(demo.patient_id);
    if (it == visits.end() || it->second.empty()) {
      throw_data("patient '" + demo.patient_id + "' has no visit records");
    }
    PatientFeatureVector p;
    p.patient_id = demo.patient_id;
    p.age = demo.age;
    p.gender = demo.gender;
    p.label = demo.label;
    for (std::size_t m = 0; m < kVitalMeasureCount; ++m) {
      double lo = std::numeric_limits<double>::infinity();
      double hi = -lo;
      double sum = 0.0;
      std::size_t count = 0;
      for (const auto* rec : it->second) {
        const double v = measure_values(*rec)[m];
        if (v == 0.0) continue;  // zero marks a missing measurement
        lo = std::min(lo, v);
        hi = std::max(hi, v);
        sum += v;
        ++count;
      }
      if (count == 0) {
        p.measures[m] = {kMissing, kMissing, kMissing};
      } else {
        // Clamp guards the min <= mean <= max invariant against rounding in
        // the running sum.
        p.measures[m] = {lo, hi, std::clamp(sum / static_cast<double>(count), lo, hi)};
      }
    }
    out.push_back(std::move(p));
  }
  return out;
}

Dataset to_dataset(const std::vector<PatientFeatureVector>& patients) {
  Dataset data;
  data.feature_names = patient_feature_names();
  data.features = Matrix(0, kPatientFeatureCount);
  for (const auto& p : patients) {
    data.features.append_row(p.to_features());
    data.labels.push_back(p.label);
  }
  return data;
}

std::vector<RawVitalsRecord> read_vitals_csv(const std::filesystem::path& path) {
  const csv::Table t = csv::read(path);
  const std::size_t id = find_column(t.header, "patient_id", path);
  const std::size_t date = find_column(t.header, "visit_date", path);
  std::array<std::size_t, kVitalMeasureCount> cols{};
  for (std::size_t m = 0; m < kVitalMeasureCount; ++m) cols[m] = find_column(t.header, vital_measure_names()[m], path);
  if (t.rows.empty()) throw_data(path.string() + ": no data rows");

  std::vector<RawVitalsRecord> out;
  out.reserve(t.rows.size());
  for (std::size_t r = 0; r < t.rows.size(); ++r) {
    std::array<double, kVitalMeasureCount> v{};
    for (std::size_t m = 0; m < kVitalMeasureCount; ++m) {
      v[m] = parse_cell(t, r, cols[m], path);
      if (v[m] < 0.0) {
        throw_data(path.string() + ": line " + std::to_string(t.line_numbers[r]) + ", column '" +
                   t.header[cols[m]] + "': negative value");
      }
    }
    out.push_back({t.rows[r][id], t.rows[r][date], v[0], v[1], v[2], v[3], v[4]});
  }
  return out;
}

std::vector<Demographics> read_demographics_csv(const std::filesystem::path& path) {
  const csv::Table t = csv::read(path);
  const std::size_t id = find_column(t.header, "patient_id", path);
  const std::size_t age = find_column(t.header, "age", path);
  const std::size_t gender = find_column(t.header, "gender", path);
  const std::size_t label = find_column(t.header, "label", path);
  if (t.rows.empty()) throw_data(path.string() + ": no data rows");

  std::vector<Demographics> out;
  out.reserve(t.rows.size());
  for (std::size_t r = 0; r < t.rows.size(); ++r) {
    Demographics d;
    d.patient_id = t.rows[r][id];
    d.age = parse_cell(t, r, age, path);
    d.gender = parse_binary(parse_cell(t, r, gender, path), t, r, gender, path);
    d.label = parse_binary(parse_cell(t, r, label, path), t, r, label, path);
    out.push_back(std::move(d));
  }
  return out;
}

void write_vitals_csv(const std::filesystem::path& path, const std::vector<RawVitalsRecord>& records) {
  std::string out = "patient_id,visit_date,weight,height,bmi,systolic_bp,diastolic_bp\n";
  for (const auto& r : records) {
    out += csv::join({r.patient_id, r.visit_date, csv::format_double(r.weight),
                      csv::format_double(r.height), csv::format_double(r.bmi),
                      csv::format_double(r.systolic_bp), csv::format_double(r.diastolic_bp)});
    out.push_back('\n');
  }
  csv::write_text(path, out);
}

void write_demographics_csv(const std::filesystem::path& path,
                            const std::vector<Demographics>& demographics) {
  std::string out = "patient_id,age,gender,label\n";
  for (const auto& d : demographics) {
    out += csv::join({d.patient_id, csv::format_double(d.age), std::to_string(d.gender),
                      std::to_string(d.label)});
    out.push_back('\n');
  }
  csv::write_text(path, out);
}

// ---------------------------------------------------------------------------
// Synthetic generator
//
// Per patient: gender ~ Bernoulli(0.55) (1 = female); age ~ U[18, 85];
// height ~ N(162, 7) cm for women, N(176, 7.5) for men, truncated to
// [140, 210]; baseline BMI ~ N(28.5, 5.5) truncated to [16, 55].
// label ~ Bernoulli(sigmoid(-0.45 + 0.22 (BMI - 28.5) + 0.06 (age - 50))).
// 1-8 visits dated between 2009-01-01 and 2012-12-31. Per visit: weight from
// the baseline BMI with 2% noise, height +- 0.5 cm, BMI recomputed,
// systolic ~ N(118 + 0.35 (age - 50) + 0.7 (BMI - 28.5) + 6 label, 12) in
// [80, 220], diastolic ~ N(76 + 0.1 (age - 50) + 0.4 (BMI - 28.5) + 3 label, 8)
// in [40, 130]. Each vital cell is zeroed (missing) with probability 0.05.

namespace {

double round_to(double v, int decimals) {
  double out = 0.0;
  csv::parse_double(csv::format_fixed(v, decimals), out);
  return out;
}

// Days since 1970-01-01 to yyyy-mm-dd (proleptic Gregorian).
std::string iso_date(long days) {
  days += 719468;
  const long era = (days >= 0 ? days : days - 146096) / 146097;
  const long doe = days - era * 146097;
  const long yoe = (doe - doe / 1460 + doe / 36524 - doe / 146096) / 365;
  long y = yoe + era * 400;
  const long doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
  const long mp = (5 * doy + 2) / 153;
  const long d = doy - (153 * mp + 2) / 5 + 1;
  const long m = mp < 10 ? mp + 3 : mp - 9;
  if (m <= 2) ++y;
  char buf[64];
  std::snprintf(buf, sizeof buf, "%04ld-%02ld-%02ld", y, m, d);
  return buf;
}

}  // namespace

SyntheticVitals generate_synthetic_vitals(std::size_t n_patients, std::uint64_t seed) {
  if (n_patients == 0) throw_usage("need at least one patient");
  constexpr long kFirstDay = 14245;  // 2009-01-01
  constexpr long kSpanDays = 1461;   // through 2012-12-31
  constexpr double kMissingRate = 0.05;

  Rng rng(seed);
  SyntheticVitals out;
  for (std::size_t i = 0; i < n_patients; ++i) {
    char id[32];
    std::snprintf(id, sizeof id, "P%06zu", i + 1);
    const int gender = rng.bernoulli(0.55) ? 1 : 0;
    const double age = std::floor(rng.uniform(18.0, 86.0));
    const double height = gender == 1 ? rng.truncated_normal(162.0, 7.0, 140.0, 210.0)
                                      : rng.truncated_normal(176.0, 7.5, 140.0, 210.0);
    const double bmi = rng.truncated_normal(28.5, 5.5, 16.0, 55.0);
    const double logit = -0.45 + 0.22 * (bmi - 28.5) + 0.06 * (age - 50.0);
    const int label = rng.bernoulli(1.0 / (1.0 + std::exp(-logit))) ? 1 : 0;
    out.demographics.push_back({id, age, gender, label});

    const auto visits = 1 + rng.below(8);
    std::vector<long> days(visits);
    for (auto& d : days) d = kFirstDay + static_cast<long>(rng.below(kSpanDays));
    std::sort(days.begin(), days.end());
    const double base_weight = bmi * height * height / 1e4;
    for (long day : days) {
      RawVitalsRecord r;
      r.patient_id = id;
      r.visit_date = iso_date(day);
      const double h = height + rng.normal(0.0, 0.5);
      const double w = base_weight * (1.0 + rng.normal(0.0, 0.02));
      const double b = w / (h * h / 1e4);
      r.weight = round_to(w, 1);
      r.height = round_to(h, 1);
      r.bmi = round_to(b, 2);
      r.systolic_bp = std::round(rng.truncated_normal(
          118.0 + 0.35 * (age - 50.0) + 0.7 * (b - 28.5) + 6.0 * label, 12.0, 80.0, 220.0));
      r.diastolic_bp = std::round(rng.truncated_normal(
          76.0 + 0.1 * (age - 50.0) + 0.4 * (b - 28.5) + 3.0 * label, 8.0, 40.0, 130.0));
      for (double* cell : {&r.weight, &r.height, &r.bmi, &r.systolic_bp, &r.diastolic_bp}) {
        if (rng.bernoulli(kMissingRate)) *cell = 0.0;
      }
      out.records.push_back(std::move(r));
    }
  }
  return out;
}

}  // namespace diabens
