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

#include "diabens/pipeline.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <map>

#include <json.hpp>

#include "diabens/csv.hpp"
#include "diabens/dataset.hpp"
#include "diabens/ensemble.hpp"
#include "diabens/error.hpp"
#include "diabens/model_selection.hpp"
#include "diabens/random.hpp"
#include "diabens/serialization.hpp"

namespace diabens {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

// Processed splits always carry this label column.
constexpr const char* kProcessedLabel = "label";

std::string normalize_key(std::string_view key) {
  std::string k(key);
  std::replace(k.begin(), k.end(), '-', '_');
  return k;
}

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(b, e - b + 1));
}

std::vector<std::string> split_list(std::string_view value) {
  std::vector<std::string> out;
  if (trim(value).empty()) return out;
  std::size_t pos = 0;
  while (true) {
    const auto comma = value.find(',', pos);
    out.push_back(trim(value.substr(pos, comma == std::string_view::npos ? std::string_view::npos : comma - pos)));
    if (comma == std::string_view::npos) break;
    pos = comma + 1;
  }
  return out;
}

double parse_number(std::string_view key, std::string_view value) {
  double v = 0.0;
  if (!csv::parse_double(trim(value), v)) {
    throw_usage("option " + std::string(key) + " expects a number, got '" + std::string(value) + "'");
  }
  return v;
}

std::uint64_t parse_count(std::string_view key, std::string_view value) {
  const std::string t = trim(value);
  std::uint64_t v = 0;
  const auto res = std::from_chars(t.data(), t.data() + t.size(), v);
  if (t.empty() || res.ec != std::errc() || res.ptr != t.data() + t.size()) {
    throw_usage("option " + std::string(key) + " expects a non-negative integer, got '" + std::string(value) + "'");
  }
  return v;
}

bool parse_bool(std::string_view key, std::string_view value) {
  const std::string t = trim(value);
  if (t == "1" || t == "true" || t == "yes" || t == "on") return true;
  if (t == "0" || t == "false" || t == "no" || t == "off") return false;
  throw_usage("option " + std::string(key) + " expects true or false, got '" + t + "'");
}

double parse_fraction(std::string_view key, std::string_view value) {
  const double v = parse_number(key, value);
  if (!(v > 0.0 && v < 1.0)) throw_usage("option " + std::string(key) + " must lie strictly between 0 and 1");
  return v;
}

ModelKind require_kind(std::string_view key) {
  if (key.empty()) throw_usage("no classifier given (use --kind knn|svm|tree|forest|boosting|mlp|nb)");
  const auto kind = parse_kind(key);
  if (!kind) {
    throw_usage("unknown classifier '" + std::string(key) + "' (use knn, svm, tree, forest, boosting, mlp or nb)");
  }
  return *kind;
}

HyperParams run_params(const RunConfig& config) {
  HyperParams p = config.params;
  validate(p);
  return p;
}

Dataset load_split(const RunConfig& config, const char* name) {
  const fs::path path = config.out_dir / name;
  if (!fs::exists(path)) {
    throw_io("missing " + path.string() + "; run 'prepare' with the same --out-dir first");
  }
  return load_csv_dataset(path, CsvSchema{kProcessedLabel, {}});
}

std::optional<StandardizerParams> load_provenance_standardizer(const RunConfig& config) {
  const fs::path path = config.out_dir / artifacts::kProvenance;
  if (!fs::exists(path)) return std::nullopt;
  try {
    const json j = json::parse(csv::read_text(path));
    const auto& s = j.at("standardizer");
    StandardizerParams p;
    p.mean = s.at("mean").get<std::vector<double>>();
    p.stddev = s.at("stddev").get<std::vector<double>>();
    p.constant = s.at("constant").get<std::vector<bool>>();
    return p;
  } catch (const json::exception& e) {
    throw_data(path.string() + ": malformed provenance file: " + e.what());
  }
}

std::string seed_text(const RunConfig& config) { return std::to_string(config.seed); }

std::string metrics_line(std::string_view title, const MetricReport& report) {
  std::string line(title);
  const auto values = report.values();
  for (std::size_t i = 0; i < values.size(); ++i) {
    line += "  ";
    line += kMetricNames[i];
    line += '=';
    line += format_metric(values[i]);
  }
  return line;
}

std::vector<int> threshold_predictions(const std::vector<double>& p, double threshold) {
  std::vector<int> out(p.size());
  for (std::size_t i = 0; i < p.size(); ++i) out[i] = p[i] >= threshold ? 1 : 0;
  return out;
}

// One grid axis: key plus the textual values to try.
struct GridAxis {
  std::string key;
  std::vector<std::string> values;
};

std::vector<GridAxis> parse_grid(const std::vector<std::string>& specs, ModelKind kind) {
  std::vector<GridAxis> axes;
  const auto allowed = hyperparam_keys_for(kind);
  for (const auto& spec : specs) {
    const auto eq = spec.find('=');
    if (eq == std::string::npos) throw_usage("grid entry '" + spec + "' must look like key=v1,v2 or key=lo..hi");
    GridAxis axis{normalize_key(trim(std::string_view(spec).substr(0, eq))), {}};
    if (std::find(allowed.begin(), allowed.end(), axis.key) == allowed.end()) {
      throw_usage("grid key '" + axis.key + "' does not apply to " + std::string(kind_key(kind)));
    }
    for (const auto& a : axes) {
      if (a.key == axis.key) throw_usage("grid key '" + axis.key + "' given twice");
    }
    const std::string rest = trim(std::string_view(spec).substr(eq + 1));
    const auto dots = rest.find("..");
    if (dots != std::string::npos) {
      const auto lo = parse_count(axis.key, rest.substr(0, dots));
      const auto hi = parse_count(axis.key, rest.substr(dots + 2));
      if (hi < lo) throw_usage("grid range for '" + axis.key + "' is empty");
      for (auto v = lo; v <= hi; ++v) axis.values.push_back(std::to_string(v));
    } else {
      for (auto& v : split_list(rest)) {
        if (v.empty()) throw_usage("grid entry '" + spec + "' has an empty value");
        axis.values.push_back(std::move(v));
      }
    }
    if (axis.values.empty()) throw_usage("grid for '" + axis.key + "' has no values");
    axes.push_back(std::move(axis));
  }
  return axes;
}

// Cartesian product, first axis varying slowest.
std::vector<HyperParams> expand_grid(const HyperParams& base, const std::vector<GridAxis>& axes) {
  std::vector<HyperParams> grid{base};
  for (const auto& axis : axes) {
    std::vector<HyperParams> next;
    for (const auto& g : grid) {
      for (const auto& v : axis.values) {
        HyperParams p = g;
        set_hyperparam(p, axis.key, v);
        validate(p);
        next.push_back(std::move(p));
      }
    }
    grid = std::move(next);
  }
  return grid;
}

std::string summary_fields(const MetricSummary& s) {
  return format_metric(s.mean) + "," + format_metric(s.stddev);
}

template <typename F>
auto with_context(std::string_view what, F&& f) {
  try {
    return f();
  } catch (const Error& e) {
    throw Error(e.kind(), std::string(what) + ": " + e.what());
  }
}

}  // namespace

// --------------------------------------------------------------------------
// Configuration

const std::vector<std::string>& config_keys() {
  static const std::vector<std::string> keys = [] {
    std::vector<std::string> k = {"input",   "vitals",       "demographics",        "label_column",
                                  "feature_columns", "zero_missing", "test_fraction", "paper_faithful",
                                  "patients", "seed",        "out_dir",             "folds",
                                  "kind",     "threshold",   "grid",                "objective",
                                  "exclude",  "member_count", "members",            "weights",
                                  "validation_fraction", "from"};
    for (const auto& h : hyperparam_keys()) {
      if (std::find(k.begin(), k.end(), h) == k.end()) k.push_back(h);
    }
    return k;
  }();
  return keys;
}

void set_config_value(RunConfig& c, std::string_view raw_key, std::string_view raw_value) {
  const std::string key = normalize_key(trim(raw_key));
  const std::string value = trim(raw_value);
  if (key == "input") {
    c.input = value;
  } else if (key == "vitals") {
    c.vitals = value;
  } else if (key == "demographics") {
    c.demographics = value;
  } else if (key == "label_column") {
    if (value.empty()) throw_usage("label_column must not be empty");
    c.label_column = value;
  } else if (key == "feature_columns") {
    c.feature_columns = split_list(value);
  } else if (key == "zero_missing") {
    c.zero_missing_columns = split_list(value);
  } else if (key == "test_fraction") {
    c.test_fraction = parse_fraction(key, value);
  } else if (key == "paper_faithful") {
    c.paper_faithful = parse_bool(key, value);
  } else if (key == "patients") {
    c.patients = parse_count(key, value);
    if (c.patients == 0) throw_usage("patients must be positive");
  } else if (key == "seed") {
    c.seed = parse_count(key, value);
    c.params.seed = c.seed;
  } else if (key == "out_dir") {
    if (value.empty()) throw_usage("out_dir must not be empty");
    c.out_dir = value;
  } else if (key == "folds") {
    c.folds = parse_count(key, value);
    if (c.folds < 2) throw_usage("folds must be at least 2");
  } else if (key == "kind") {
    c.kind = value;
  } else if (key == "threshold") {
    c.threshold = parse_number(key, value);
    if (!(c.threshold >= 0.0 && c.threshold <= 1.0)) throw_usage("threshold must lie in [0, 1]");
  } else if (key == "grid") {
    if (value.empty()) throw_usage("grid entry must not be empty");
    c.grid.push_back(value);
  } else if (key == "objective") {
    parse_objective(value);
    c.objective = value;
  } else if (key == "exclude") {
    c.exclude = split_list(value);
    for (const auto& e : c.exclude) require_kind(e);
  } else if (key == "member_count") {
    c.member_count = parse_count(key, value);
    if (c.member_count == 0) throw_usage("member_count must be positive");
  } else if (key == "members") {
    c.members = split_list(value);
    for (const auto& m : c.members) require_kind(m);
  } else if (key == "weights") {
    c.weights.clear();
    for (const auto& w : split_list(value)) c.weights.push_back(parse_number(key, w));
  } else if (key == "validation_fraction") {
    c.validation_fraction = parse_fraction(key, value);
  } else if (key == "from") {
    c.from = value;
  } else {
    const auto& hk = hyperparam_keys();
    if (std::find(hk.begin(), hk.end(), key) == hk.end()) {
      throw_usage("unknown option '" + key + "'");
    }
    set_hyperparam(c.params, key, value);
  }
}

void apply_config_text(RunConfig& config, std::string_view text) {
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const auto nl = text.find('\n', pos);
    std::string_view line = text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
    pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string_view::npos) line = line.substr(0, hash);
    if (trim(line).empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw_usage("config line " + std::to_string(line_no) + ": expected key=value");
    }
    try {
      set_config_value(config, line.substr(0, eq), line.substr(eq + 1));
    } catch (const Error& e) {
      throw Error(e.kind(), "config line " + std::to_string(line_no) + ": " + e.what());
    }
  }
}

void apply_config_file(RunConfig& config, const fs::path& path) {
  if (!fs::exists(path)) throw_usage("config file " + path.string() + " does not exist");
  try {
    apply_config_text(config, csv::read_text(path));
  } catch (const Error& e) {
    throw Error(e.kind(), path.string() + ": " + e.what());
  }
}

// --------------------------------------------------------------------------
// synth

void cmd_synth(const RunConfig& config, const LogSink& log) {
  fs::create_directories(config.out_dir);
  const SyntheticVitals s = generate_synthetic_vitals(config.patients, config.seed);
  write_vitals_csv(config.out_dir / artifacts::kSynthVitals, s.records);
  write_demographics_csv(config.out_dir / artifacts::kSynthDemographics, s.demographics);
  std::size_t positives = 0;
  for (const auto& d : s.demographics) positives += d.label == 1 ? 1 : 0;
  log("synthesized " + std::to_string(s.demographics.size()) + " patients (" + std::to_string(positives) +
      " positive), " + std::to_string(s.records.size()) + " visits into " + config.out_dir.string());
}

// --------------------------------------------------------------------------
// prepare

void cmd_prepare(const RunConfig& config, const LogSink& log) {
  const bool single = !config.input.empty();
  const bool vitals = !config.vitals.empty() || !config.demographics.empty();
  if (single && vitals) throw_usage("give either --input or --vitals/--demographics, not both");
  if (!single && !vitals) throw_usage("prepare needs --input or --vitals with --demographics");

  Dataset data;
  std::vector<std::string> warnings;
  json inputs = json::object();
  if (single) {
    if (!fs::exists(config.input)) throw_io("input file " + config.input.string() + " does not exist");
    data = load_csv_dataset(config.input, CsvSchema{config.label_column, config.feature_columns});
    inputs["input"] = config.input.generic_string();
    if (!config.zero_missing_columns.empty()) {
      GapReport gaps = zeros_to_missing(data, config.zero_missing_columns);
      data = std::move(gaps.data);
      warnings.insert(warnings.end(), gaps.warnings.begin(), gaps.warnings.end());
    }
  } else {
    if (config.vitals.empty() || config.demographics.empty()) {
      throw_usage("the vitals path needs both --vitals and --demographics");
    }
    for (const auto& p : {config.vitals, config.demographics}) {
      if (!fs::exists(p)) throw_io("input file " + p.string() + " does not exist");
    }
    const auto records = read_vitals_csv(config.vitals);
    const auto demo = read_demographics_csv(config.demographics);
    data = to_dataset(aggregate_vitals(records, demo));
    inputs["vitals"] = config.vitals.generic_string();
    inputs["demographics"] = config.demographics.generic_string();
  }
  validate(data);

  auto [train, test] = train_test_split(data, config.test_fraction, config.seed);
  // --paper-faithful takes imputation means over the whole table.
  const ImputationParams imputation = fit_imputer(config.paper_faithful ? data : train);
  train = apply_imputer(imputation, train);
  test = apply_imputer(imputation, test);
  FittedStandardizer standardizer = fit_standardizer(train);
  warnings.insert(warnings.end(), standardizer.warnings.begin(), standardizer.warnings.end());
  train = apply_standardizer(standardizer.params, train);
  test = apply_standardizer(standardizer.params, test);

  fs::create_directories(config.out_dir);
  write_csv_dataset(config.out_dir / artifacts::kTrain, train, kProcessedLabel);
  write_csv_dataset(config.out_dir / artifacts::kTest, test, kProcessedLabel);

  json prov = {{"schema_version", kSchemaVersion},
               {"seed", config.seed},
               {"test_fraction", config.test_fraction},
               {"paper_faithful", config.paper_faithful},
               {"inputs", inputs},
               {"label_column", config.label_column},
               {"feature_names", data.feature_names},
               {"rows", {{"train", train.rows()}, {"test", test.rows()}}},
               {"imputation_means", imputation.fill_values},
               {"standardizer",
                {{"mean", standardizer.params.mean},
                 {"stddev", standardizer.params.stddev},
                 {"constant", standardizer.params.constant}}},
               {"warnings", warnings}};
  csv::write_text(config.out_dir / artifacts::kProvenance, prov.dump(2) + "\n");

  for (const auto& w : warnings) log("warning: " + w);
  log("prepared " + std::to_string(data.cols()) + " features: " + std::to_string(train.rows()) + " train rows (" +
      std::to_string(train.count_label(1)) + " positive), " + std::to_string(test.rows()) + " test rows (" +
      std::to_string(test.count_label(1)) + " positive)");
}

// --------------------------------------------------------------------------
// train

void cmd_train(const RunConfig& config, const LogSink& log) {
  const ModelKind kind = require_kind(config.kind);
  const HyperParams params = run_params(config);
  const Dataset train = load_split(config, artifacts::kTrain);
  const Dataset test = load_split(config, artifacts::kTest);

  TrainedModel model = with_context(kind_title(kind), [&] { return train_model(kind, train, params); });
  model.set_standardizer(load_provenance_standardizer(config));

  const auto proba = model.predict_proba(test.features);
  const MetricReport report = metric_suite(confusion_matrix(threshold_predictions(proba, config.threshold), test.labels));

  const fs::path models = config.out_dir / artifacts::kModelsDir;
  fs::create_directories(models);
  save_model(models / (std::string(kind_key(kind)) + ".json"), model);

  const fs::path report_path = config.out_dir / artifacts::kReport;
  if (!fs::exists(report_path)) {
    csv::write_text(report_path, "classifier," + metric_csv_header() + ",log_loss,seed,schema_version\n");
  }
  csv::append_text(report_path, csv::escape(kind_title(kind)) + "," + metric_csv_fields(report) + "," +
                                    csv::format_fixed(log_loss(proba, test.labels), 4) + "," + seed_text(config) +
                                    "," + std::to_string(kSchemaVersion) + "\n");
  log(metrics_line(kind_title(kind), report));
}

// --------------------------------------------------------------------------
// cv

void cmd_cv(const RunConfig& config, const LogSink& log) {
  const ModelKind kind = require_kind(config.kind);
  const Objective objective = parse_objective(config.objective);
  const auto axes = parse_grid(config.grid, kind);
  const auto grid = expand_grid(run_params(config), axes);
  const Dataset train = load_split(config, artifacts::kTrain);

  const GridSearchResult search = with_context(kind_title(kind), [&] {
    return grid_search(train, kind, grid, config.folds, config.seed, objective.name);
  });

  const auto keys = hyperparam_keys_for(kind);
  std::string out = "config";
  for (const auto& k : keys) out += "," + k;
  for (const auto& name : kMetricNames) out += "," + std::string(name) + "_mean," + std::string(name) + "_std";
  out += ",log_loss_mean,log_loss_std,train_accuracy_mean,objective,best,folds,seed,schema_version\n";
  for (std::size_t i = 0; i < search.results.size(); ++i) {
    const CvResult& r = search.results[i];
    out += std::to_string(i + 1);
    for (const auto& k : keys) out += "," + csv::escape(get_hyperparam(r.spec.params, k));
    for (const auto& s : r.summary) out += "," + summary_fields(s);
    out += "," + summary_fields(r.log_loss) + "," + format_metric(r.train_accuracy.mean) + "," + objective.name +
           "," + (i == search.best_index ? "1" : "0") + "," + std::to_string(config.folds) + "," +
           seed_text(config) + "," + std::to_string(kSchemaVersion) + "\n";
  }
  fs::create_directories(config.out_dir);
  const std::string key(kind_key(kind));
  csv::write_text(config.out_dir / ("cv_" + key + ".csv"), out);

  for (const auto& axis : axes) {
    std::string curve = axis.key + ",train_error,cv_error,seed,schema_version\n";
    for (const auto& p : error_curve(search.results, axis.key)) {
      curve += csv::escape(p.value) + "," + csv::format_fixed(p.train_error, 4) + "," +
               csv::format_fixed(p.cv_error, 4) + "," + seed_text(config) + "," + std::to_string(kSchemaVersion) +
               "\n";
    }
    csv::write_text(config.out_dir / ("curve_" + key + "_" + axis.key + ".csv"), curve);
  }

  // Best configuration as a config file that train accepts via --config.
  std::string best_cfg;
  for (const auto& k : keys) {
    if (k != "seed") best_cfg += k + "=" + get_hyperparam(search.best, k) + "\n";
  }
  csv::write_text(config.out_dir / ("best_" + key + ".cfg"), best_cfg);

  const CvResult& best = search.results[search.best_index];
  std::string line = std::string(kind_title(kind)) + " best of " + std::to_string(grid.size()) + " by " +
                     objective.name + ":";
  for (const auto& k : keys) line += " " + k + "=" + get_hyperparam(search.best, k);
  line += "  cv accuracy=" + format_metric(best.summary[0].mean) + " log_loss=" + format_metric(best.log_loss.mean);
  log(line);
}

// --------------------------------------------------------------------------
// ensemble

namespace {

std::string ensemble_label(const std::vector<TrainedModel>& members) {
  std::string s;
  for (const auto& m : members) {
    if (!s.empty()) s += "+";
    s += kind_key(m.kind());
  }
  return s;
}

void write_ensemble_report(const RunConfig& config, const EnsembleModel& ens, const Dataset& test,
                           const LogSink& log) {
  const MetricReport report = evaluate_ensemble(ens, test);
  const double loss = log_loss(ens.predict_proba(test.features), test.labels);
  std::string out = "classifier,members," + metric_csv_header() + ",log_loss,seed,schema_version\n";
  out += "Ensemble," + ensemble_label(ens.members()) + "," + metric_csv_fields(report) + "," +
         csv::format_fixed(loss, 4) + "," + seed_text(config) + "," + std::to_string(kSchemaVersion) + "\n";
  csv::write_text(config.out_dir / artifacts::kEnsembleReport, out);
  log(metrics_line("Ensemble (" + ensemble_label(ens.members()) + ")", report));
}

}  // namespace

EnsembleBuild build_ensemble(const RunConfig& config, const Dataset& train, const LogSink& log) {
  const HyperParams params = run_params(config);
  const SplitIndices carve =
      stratified_split_indices(train.labels, config.validation_fraction, derive_seed(config.seed, 1));
  const Dataset fit_part = subset(train, carve.train);
  const Dataset validation = subset(train, carve.test);

  std::vector<ModelKind> kinds;
  if (!config.members.empty()) {
    for (const auto& m : config.members) {
      const ModelKind k = require_kind(m);
      if (std::find(kinds.begin(), kinds.end(), k) != kinds.end()) {
        throw_usage("member '" + m + "' listed twice");
      }
      kinds.push_back(k);
    }
  } else {
    std::vector<ModelKind> excluded;
    for (const auto& e : config.exclude) excluded.push_back(require_kind(e));
    std::vector<MemberReport> reports;
    for (ModelKind k : kAllModelKinds) {
      if (std::find(excluded.begin(), excluded.end(), k) != excluded.end()) continue;
      reports.push_back({k, with_context(kind_title(k), [&] {
                           return cross_validate(fit_part, ModelSpec{k, params}, config.folds, config.seed);
                         })});
      log(std::string(kind_title(k)) + " cv log_loss=" + format_metric(reports.back().result.log_loss.mean));
    }
    if (reports.size() < config.member_count) {
      throw_usage("ensemble needs " + std::to_string(config.member_count) + " members but only " +
                  std::to_string(reports.size()) + " classifiers remain after exclusions");
    }
    kinds = select_members(reports, excluded, config.member_count);
  }
  if (!config.weights.empty() && config.weights.size() != kinds.size()) {
    throw_usage(std::to_string(config.weights.size()) + " weights given for " + std::to_string(kinds.size()) +
                " members");
  }

  std::vector<TrainedModel> members;
  for (ModelKind k : kinds) {
    members.push_back(with_context(kind_title(k), [&] { return train_model(k, fit_part, params); }));
  }

  const Matrix val_probas = member_probabilities(members, validation.features);
  WeightOptimization opt;
  if (config.weights.empty()) {
    opt = optimize_weights(val_probas, validation.labels, config.seed);
  } else {
    opt.weights = normalize_weights(config.weights);
    for (std::size_t j = 0; j < members.size(); ++j) {
      opt.member_losses.push_back(log_loss(val_probas.column(j), validation.labels));
    }
    std::vector<double> p(validation.rows());
    for (std::size_t i = 0; i < p.size(); ++i) p[i] = combine_probabilities(opt.weights, val_probas.row(i));
    opt.loss = log_loss(p, validation.labels);
  }
  EnsembleBuild out;
  out.raw_weights = config.weights.empty() ? opt.weights : config.weights;
  out.members = std::move(members);
  out.optimization = std::move(opt);
  return out;
}

void cmd_ensemble(const RunConfig& config, const LogSink& log) {
  const Dataset test = load_split(config, artifacts::kTest);
  fs::create_directories(config.out_dir);

  if (!config.from.empty()) {
    if (!fs::exists(config.from)) throw_io("ensemble file " + config.from.string() + " does not exist");
    const EnsembleModel ens = load_ensemble(config.from);
    write_ensemble_report(config, ens, test, log);
    return;
  }

  const EnsembleBuild built = build_ensemble(config, load_split(config, artifacts::kTrain), log);
  std::vector<TrainedModel> members = built.members;
  const WeightOptimization& opt = built.optimization;
  const std::vector<double>& raw_weights = built.raw_weights;

  const fs::path models = config.out_dir / artifacts::kModelsDir;
  fs::create_directories(models);
  EnsembleDocument doc;
  doc.weights = raw_weights;
  doc.threshold = config.threshold;
  doc.seed = config.seed;
  for (const auto& m : members) {
    const std::string rel = std::string(artifacts::kModelsDir) + "/ensemble_member_" + std::string(kind_key(m.kind())) + ".json";
    save_model(config.out_dir / rel, m);
    doc.member_files.push_back(rel);
  }
  save_ensemble(config.out_dir / artifacts::kEnsemble, doc);

  std::string weights_csv = "member,weight,member_log_loss,ensemble_log_loss,seed,schema_version\n";
  for (std::size_t j = 0; j < members.size(); ++j) {
    weights_csv += std::string(kind_key(members[j].kind())) + "," + csv::format_double(opt.weights[j]) + "," +
                   csv::format_fixed(opt.member_losses[j], 6) + "," + csv::format_fixed(opt.loss, 6) + "," +
                   seed_text(config) + "," + std::to_string(kSchemaVersion) + "\n";
    log("weight " + std::string(kind_title(members[j].kind())) + " = " + csv::format_fixed(opt.weights[j], 4) +
        " (validation log_loss " + csv::format_fixed(opt.member_losses[j], 4) + ")");
  }
  csv::write_text(config.out_dir / artifacts::kEnsembleWeights, weights_csv);
  log("ensemble validation log_loss " + csv::format_fixed(opt.loss, 4));

  const EnsembleModel ens(std::move(members), raw_weights, config.threshold);
  write_ensemble_report(config, ens, test, log);
}

// --------------------------------------------------------------------------
// report

void cmd_report(const RunConfig& config, const LogSink& log) {
  const fs::path report_path = config.out_dir / artifacts::kReport;
  if (!fs::exists(report_path)) {
    throw_data("no report rows found: " + report_path.string() + " does not exist; run 'train' first");
  }
  const csv::Table table = csv::read(report_path);
  auto column = [](const csv::Table& t, const std::string& name, const fs::path& p) {
    const auto it = std::find(t.header.begin(), t.header.end(), name);
    if (it == t.header.end()) throw_data(p.string() + ": missing column '" + name + "'");
    return static_cast<std::size_t>(it - t.header.begin());
  };
  if (table.rows.empty()) throw_data("no report rows found in " + report_path.string());

  struct Row {
    std::string classifier;
    std::vector<std::string> values;
  };
  auto extract = [&](const csv::Table& t, const fs::path& p, std::size_t r) {
    Row row;
    row.classifier = t.rows[r].at(column(t, "classifier", p));
    for (const auto& name : kMetricNames) row.values.push_back(t.rows[r].at(column(t, std::string(name), p)));
    return row;
  };

  // Latest row per classifier, in canonical classifier order.
  std::map<std::string, Row> latest;
  std::vector<std::string> seen;
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    Row row = extract(table, report_path, r);
    if (!latest.count(row.classifier)) seen.push_back(row.classifier);
    latest[row.classifier] = std::move(row);
  }
  std::vector<Row> rows;
  for (ModelKind k : kAllModelKinds) {
    const std::string title(kind_title(k));
    if (latest.count(title)) rows.push_back(latest[title]);
  }
  for (const auto& s : seen) {
    if (std::none_of(rows.begin(), rows.end(), [&](const Row& r) { return r.classifier == s; })) {
      rows.push_back(latest[s]);
    }
  }

  std::string notice;
  const fs::path ens_path = config.out_dir / artifacts::kEnsembleReport;
  if (fs::exists(ens_path)) {
    const csv::Table et = csv::read(ens_path);
    for (std::size_t r = 0; r < et.rows.size(); ++r) {
      Row row = extract(et, ens_path, r);
      const auto mcol = std::find(et.header.begin(), et.header.end(), "members");
      if (mcol != et.header.end()) row.classifier += " (" + et.rows[r].at(mcol - et.header.begin()) + ")";
      rows.push_back(std::move(row));
    }
  } else {
    notice = "note: no ensemble report found; run 'ensemble' to add the ensemble row";
    log(notice);
  }

  std::string wide = "classifier," + metric_csv_header() + ",seed,schema_version\n";
  std::string longform = "classifier,metric,value,seed,schema_version\n";
  for (const auto& r : rows) {
    wide += csv::escape(r.classifier);
    for (std::size_t i = 0; i < r.values.size(); ++i) {
      wide += "," + r.values[i];
      longform += csv::escape(r.classifier) + "," + std::string(kMetricTitles[i]) + "," + r.values[i] + "," +
                  seed_text(config) + "," + std::to_string(kSchemaVersion) + "\n";
    }
    wide += "," + seed_text(config) + "," + std::to_string(kSchemaVersion) + "\n";
  }

  // Aligned text table.
  std::vector<std::size_t> width(7, 0);
  width[0] = std::string("Classifier").size();
  for (std::size_t i = 0; i < 6; ++i) width[i + 1] = kMetricTitles[i].size();
  for (const auto& r : rows) {
    width[0] = std::max(width[0], r.classifier.size());
    for (std::size_t i = 0; i < 6; ++i) width[i + 1] = std::max(width[i + 1], r.values[i].size());
  }
  auto pad = [](const std::string& s, std::size_t w, bool right) {
    const std::string fill(w > s.size() ? w - s.size() : 0, ' ');
    return right ? fill + s : s + fill;
  };
  std::string text = pad("Classifier", width[0], false);
  for (std::size_t i = 0; i < 6; ++i) text += "  " + pad(std::string(kMetricTitles[i]), width[i + 1], true);
  text += "\n";
  std::size_t total = width[0];
  for (std::size_t i = 1; i < width.size(); ++i) total += 2 + width[i];
  text += std::string(total, '-') + "\n";
  for (const auto& r : rows) {
    text += pad(r.classifier, width[0], false);
    for (std::size_t i = 0; i < 6; ++i) text += "  " + pad(r.values[i], width[i + 1], true);
    text += "\n";
  }
  if (!notice.empty()) text += notice + "\n";
  text += "seed " + seed_text(config) + ", schema_version " + std::to_string(kSchemaVersion) + "\n";

  csv::write_text(config.out_dir / artifacts::kComparisonCsv, wide);
  csv::write_text(config.out_dir / artifacts::kComparisonLongCsv, longform);
  csv::write_text(config.out_dir / artifacts::kComparisonTxt, text);

  std::size_t start = 0;
  while (start < text.size()) {
    const auto nl = text.find('\n', start);
    log(std::string_view(text).substr(start, nl - start));
    start = nl + 1;
  }
}

}  // namespace diabens
