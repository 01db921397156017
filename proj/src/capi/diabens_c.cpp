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

#include "diabens/diabens.h"

#include <cmath>
#include <exception>
#include <filesystem>
#include <new>
#include <string>
#include <vector>

#include "diabens/dataset.hpp"
#include "diabens/ensemble.hpp"
#include "diabens/error.hpp"
#include "diabens/metrics.hpp"
#include "diabens/model.hpp"
#include "diabens/pipeline.hpp"
#include "diabens/serialization.hpp"

struct diabens_dataset {
  diabens::Dataset data;
};

struct diabens_model {
  diabens::TrainedModel model;
};

struct diabens_ensemble {
  diabens::EnsembleModel ensemble;
};

struct diabens_config {
  diabens::RunConfig config;
};

namespace {

thread_local std::string g_last_error;

diabens_status status_for(diabens::ErrorKind kind) {
  switch (kind) {
    case diabens::ErrorKind::Usage: return DIABENS_ERR_USAGE;
    case diabens::ErrorKind::Io: return DIABENS_ERR_IO;
    case diabens::ErrorKind::Data: return DIABENS_ERR_DATA;
    case diabens::ErrorKind::Numeric: return DIABENS_ERR_NUMERIC;
  }
  return DIABENS_ERR_INTERNAL;
}

template <typename F>
diabens_status guarded(F&& f) {
  try {
    f();
    return DIABENS_OK;
  } catch (const diabens::Error& e) {
    g_last_error = e.what();
    return status_for(e.kind());
  } catch (const std::filesystem::filesystem_error& e) {
    g_last_error = e.what();
    return DIABENS_ERR_IO;
  } catch (const std::bad_alloc&) {
    g_last_error = "out of memory";
    return DIABENS_ERR_INTERNAL;
  } catch (const std::exception& e) {
    g_last_error = std::string("internal error: ") + e.what();
    return DIABENS_ERR_INTERNAL;
  } catch (...) {
    g_last_error = "internal error";
    return DIABENS_ERR_INTERNAL;
  }
}

void require(const void* p, const char* what) {
  if (p == nullptr) diabens::throw_usage(std::string(what) + " must not be NULL");
}

std::vector<std::string> string_list(const char* const* items, size_t n) {
  std::vector<std::string> out;
  if (n > 0) require(items, "string list");
  for (size_t i = 0; i < n; ++i) {
    require(items[i], "string list entry");
    out.emplace_back(items[i]);
  }
  return out;
}

void fill_report(const diabens::MetricReport& r, const diabens::ConfusionMatrix& cm, diabens_metric_report* out) {
  const auto values = r.values();
  for (size_t i = 0; i < values.size(); ++i) {
    out->defined[i] = values[i].has_value() ? 1 : 0;
    out->values[i] = values[i].value_or(std::nan(""));
  }
  out->tp = cm.tp;
  out->fp = cm.fp;
  out->tn = cm.tn;
  out->fn = cm.fn;
}

void evaluate_into(const std::vector<int>& predicted, const std::vector<int>& actual, diabens_metric_report* out) {
  const auto cm = diabens::confusion_matrix(predicted, actual);
  fill_report(diabens::metric_suite(cm), cm, out);
}

diabens::Matrix rows_matrix(const double* x, size_t n, size_t cols) {
  if (n > 0) require(x, "x");
  diabens::Matrix m(n, cols);
  for (size_t i = 0; i < n * cols; ++i) m.data()[i] = x[i];
  return m;
}

}  // namespace

extern "C" {

const char* diabens_version(void) { return "0.1.0"; }

const char* diabens_last_error(void) { return g_last_error.c_str(); }

const char* diabens_status_name(diabens_status status) {
  switch (status) {
    case DIABENS_OK: return "ok";
    case DIABENS_ERR_USAGE: return "usage error";
    case DIABENS_ERR_IO: return "i/o error";
    case DIABENS_ERR_DATA: return "data error";
    case DIABENS_ERR_NUMERIC: return "numeric error";
    case DIABENS_ERR_INTERNAL: return "internal error";
  }
  return "unknown status";
}

int diabens_exit_code(diabens_status status) {
  switch (status) {
    case DIABENS_OK: return 0;
    case DIABENS_ERR_USAGE: return 2;
    case DIABENS_ERR_IO:
    case DIABENS_ERR_DATA: return 3;
    case DIABENS_ERR_NUMERIC: return 4;
    case DIABENS_ERR_INTERNAL: return 1;
  }
  return 1;
}

diabens_status diabens_dataset_load_csv(const char* path, const char* label_column,
                                        const char* const* feature_columns, size_t n_feature_columns,
                                        diabens_dataset** out) {
  return guarded([&] {
    require(path, "path");
    require(label_column, "label_column");
    require(out, "out");
    diabens::CsvSchema schema{label_column, string_list(feature_columns, n_feature_columns)};
    *out = new diabens_dataset{diabens::load_csv_dataset(path, schema)};
  });
}

diabens_status diabens_dataset_load_vitals(const char* vitals_path, const char* demographics_path,
                                           diabens_dataset** out) {
  return guarded([&] {
    require(vitals_path, "vitals_path");
    require(demographics_path, "demographics_path");
    require(out, "out");
    const auto records = diabens::read_vitals_csv(vitals_path);
    const auto demo = diabens::read_demographics_csv(demographics_path);
    *out = new diabens_dataset{diabens::to_dataset(diabens::aggregate_vitals(records, demo))};
  });
}

diabens_status diabens_dataset_from_arrays(const double* features, const int* labels, size_t rows, size_t cols,
                                           diabens_dataset** out) {
  return guarded([&] {
    require(out, "out");
    if (rows > 0) require(labels, "labels");
    diabens::Dataset d;
    d.features = rows_matrix(features, rows, cols);
    d.labels.assign(labels, labels + rows);
    for (size_t c = 0; c < cols; ++c) d.feature_names.push_back("x" + std::to_string(c));
    diabens::validate(d);
    *out = new diabens_dataset{std::move(d)};
  });
}

void diabens_dataset_free(diabens_dataset* data) { delete data; }

size_t diabens_dataset_rows(const diabens_dataset* data) { return data ? data->data.rows() : 0; }

size_t diabens_dataset_cols(const diabens_dataset* data) { return data ? data->data.cols() : 0; }

const char* diabens_dataset_feature_name(const diabens_dataset* data, size_t col) {
  if (!data || col >= data->data.feature_names.size()) return nullptr;
  return data->data.feature_names[col].c_str();
}

diabens_status diabens_dataset_value(const diabens_dataset* data, size_t row, size_t col, double* out) {
  return guarded([&] {
    require(data, "data");
    require(out, "out");
    if (row >= data->data.rows() || col >= data->data.cols()) diabens::throw_usage("cell index out of range");
    *out = data->data.features(row, col);
  });
}

diabens_status diabens_dataset_label(const diabens_dataset* data, size_t row, int* out) {
  return guarded([&] {
    require(data, "data");
    require(out, "out");
    if (row >= data->data.rows()) diabens::throw_usage("row index out of range");
    *out = data->data.labels[row];
  });
}

diabens_status diabens_dataset_zeros_to_missing(diabens_dataset* data, const char* const* columns,
                                                size_t n_columns) {
  return guarded([&] {
    require(data, "data");
    data->data = diabens::zeros_to_missing(data->data, string_list(columns, n_columns)).data;
  });
}

diabens_status diabens_dataset_split(const diabens_dataset* data, double test_fraction, uint64_t seed,
                                     diabens_dataset** train_out, diabens_dataset** test_out) {
  return guarded([&] {
    require(data, "data");
    require(train_out, "train_out");
    require(test_out, "test_out");
    auto [train, test] = diabens::train_test_split(data->data, test_fraction, seed);
    auto* tr = new diabens_dataset{std::move(train)};
    try {
      *test_out = new diabens_dataset{std::move(test)};
    } catch (...) {
      delete tr;
      throw;
    }
    *train_out = tr;
  });
}

diabens_status diabens_dataset_preprocess(diabens_dataset* train, diabens_dataset* test) {
  return guarded([&] {
    require(train, "train");
    const auto imputation = diabens::fit_imputer(train->data);
    diabens::Dataset tr = diabens::apply_imputer(imputation, train->data);
    const auto standardizer = diabens::fit_standardizer(tr);
    diabens::Dataset tr_out = diabens::apply_standardizer(standardizer.params, tr);
    if (test) {
      test->data = diabens::apply_standardizer(standardizer.params, diabens::apply_imputer(imputation, test->data));
    }
    train->data = std::move(tr_out);
  });
}

diabens_status diabens_dataset_write_csv(const diabens_dataset* data, const char* path) {
  return guarded([&] {
    require(data, "data");
    require(path, "path");
    diabens::write_csv_dataset(path, data->data);
  });
}

diabens_status diabens_generate_synthetic(size_t n_patients, uint64_t seed, const char* vitals_path,
                                          const char* demographics_path) {
  return guarded([&] {
    require(vitals_path, "vitals_path");
    require(demographics_path, "demographics_path");
    const auto s = diabens::generate_synthetic_vitals(n_patients, seed);
    diabens::write_vitals_csv(vitals_path, s.records);
    diabens::write_demographics_csv(demographics_path, s.demographics);
  });
}

diabens_config* diabens_config_create(void) {
  try {
    return new diabens_config{};
  } catch (...) {
    g_last_error = "out of memory";
    return nullptr;
  }
}

void diabens_config_free(diabens_config* config) { delete config; }

diabens_status diabens_config_set(diabens_config* config, const char* key, const char* value) {
  return guarded([&] {
    require(config, "config");
    require(key, "key");
    require(value, "value");
    diabens::set_config_value(config->config, key, value);
  });
}

diabens_status diabens_config_load_file(diabens_config* config, const char* path) {
  return guarded([&] {
    require(config, "config");
    require(path, "path");
    diabens::apply_config_file(config->config, path);
  });
}

diabens_status diabens_model_train(const char* kind, const diabens_dataset* train, const diabens_config* config,
                                   diabens_model** out) {
  return guarded([&] {
    require(kind, "kind");
    require(train, "train");
    require(out, "out");
    const auto k = diabens::parse_kind(kind);
    if (!k) diabens::throw_usage(std::string("unknown classifier '") + kind + "'");
    const diabens::HyperParams params = config ? config->config.params : diabens::HyperParams{};
    diabens::validate(params);
    try {
      *out = new diabens_model{diabens::train_model(*k, train->data, params)};
    } catch (const diabens::Error& e) {
      throw diabens::Error(e.kind(), std::string(diabens::kind_title(*k)) + ": " + e.what());
    }
  });
}

void diabens_model_free(diabens_model* model) { delete model; }

const char* diabens_model_kind(const diabens_model* model) {
  return model ? diabens::kind_key(model->model.kind()).data() : nullptr;
}

size_t diabens_model_feature_count(const diabens_model* model) { return model ? model->model.feature_count() : 0; }

diabens_status diabens_model_predict_proba(const diabens_model* model, const double* x, size_t n, double* out) {
  return guarded([&] {
    require(model, "model");
    if (n > 0) require(out, "out");
    const auto p = model->model.predict_proba(rows_matrix(x, n, model->model.feature_count()));
    std::copy(p.begin(), p.end(), out);
  });
}

diabens_status diabens_model_predict_dataset(const diabens_model* model, const diabens_dataset* data,
                                             double* out) {
  return guarded([&] {
    require(model, "model");
    require(data, "data");
    if (data->data.rows() > 0) require(out, "out");
    const auto p = model->model.predict_proba(data->data.features);
    std::copy(p.begin(), p.end(), out);
  });
}

diabens_status diabens_model_feature_importance(const diabens_model* model, double* out, size_t n) {
  return guarded([&] {
    require(model, "model");
    require(out, "out");
    const auto imp = diabens::feature_importance(model->model);
    if (n < imp.size()) diabens::throw_usage("output buffer holds " + std::to_string(n) + " values, need " + std::to_string(imp.size()));
    std::copy(imp.begin(), imp.end(), out);
  });
}

diabens_status diabens_model_evaluate(const diabens_model* model, const diabens_dataset* data, double threshold,
                                      diabens_metric_report* out) {
  return guarded([&] {
    require(model, "model");
    require(data, "data");
    require(out, "out");
    if (!(threshold >= 0.0 && threshold <= 1.0)) diabens::throw_usage("threshold must lie in [0, 1]");
    evaluate_into(model->model.predict(data->data.features, threshold), data->data.labels, out);
  });
}

diabens_status diabens_model_save(const diabens_model* model, const char* path) {
  return guarded([&] {
    require(model, "model");
    require(path, "path");
    diabens::save_model(path, model->model);
  });
}

diabens_status diabens_model_load(const char* path, diabens_model** out) {
  return guarded([&] {
    require(path, "path");
    require(out, "out");
    *out = new diabens_model{diabens::load_model(path)};
  });
}

diabens_status diabens_evaluate_labels(const int* predicted, const int* actual, size_t n,
                                       diabens_metric_report* out) {
  return guarded([&] {
    require(out, "out");
    if (n > 0) {
      require(predicted, "predicted");
      require(actual, "actual");
    }
    evaluate_into(std::vector<int>(predicted, predicted + n), std::vector<int>(actual, actual + n), out);
  });
}

diabens_status diabens_log_loss(const double* probabilities, const int* actual, size_t n, double clip_epsilon,
                                double* out) {
  return guarded([&] {
    require(out, "out");
    if (n > 0) {
      require(probabilities, "probabilities");
      require(actual, "actual");
    }
    const double eps = clip_epsilon > 0.0 ? clip_epsilon : diabens::kDefaultClipEpsilon;
    *out = diabens::log_loss(std::span<const double>(probabilities, n), std::span<const int>(actual, n), eps);
  });
}

diabens_status diabens_ensemble_create(const diabens_model* const* members, const double* weights, size_t n_members,
                                       double threshold, diabens_ensemble** out) {
  return guarded([&] {
    require(out, "out");
    if (n_members > 0) {
      require(members, "members");
      require(weights, "weights");
    }
    std::vector<diabens::TrainedModel> ms;
    for (size_t i = 0; i < n_members; ++i) {
      require(members[i], "member");
      ms.push_back(members[i]->model);
    }
    *out = new diabens_ensemble{
        diabens::EnsembleModel(std::move(ms), std::vector<double>(weights, weights + n_members), threshold)};
  });
}

void diabens_ensemble_free(diabens_ensemble* ensemble) { delete ensemble; }

diabens_status diabens_ensemble_predict_proba(const diabens_ensemble* ensemble, const double* x, size_t n,
                                              double* out) {
  return guarded([&] {
    require(ensemble, "ensemble");
    if (n > 0) require(out, "out");
    const auto p = ensemble->ensemble.predict_proba(rows_matrix(x, n, ensemble->ensemble.feature_count()));
    std::copy(p.begin(), p.end(), out);
  });
}

diabens_status diabens_ensemble_evaluate(const diabens_ensemble* ensemble, const diabens_dataset* data,
                                         diabens_metric_report* out) {
  return guarded([&] {
    require(ensemble, "ensemble");
    require(data, "data");
    require(out, "out");
    if (data->data.cols() != ensemble->ensemble.feature_count()) {
      diabens::throw_usage("dataset has " + std::to_string(data->data.cols()) + " features, ensemble expects " +
                           std::to_string(ensemble->ensemble.feature_count()));
    }
    evaluate_into(ensemble->ensemble.predict(data->data.features), data->data.labels, out);
  });
}

diabens_status diabens_ensemble_optimize(const diabens_model* const* members, size_t n_members,
                                         const diabens_dataset* data, uint64_t seed, double* weights_out,
                                         double* loss_out) {
  return guarded([&] {
    require(data, "data");
    require(weights_out, "weights_out");
    if (n_members > 0) require(members, "members");
    std::vector<diabens::TrainedModel> ms;
    for (size_t i = 0; i < n_members; ++i) {
      require(members[i], "member");
      ms.push_back(members[i]->model);
    }
    const auto opt = diabens::optimize_weights(ms, data->data, seed);
    std::copy(opt.weights.begin(), opt.weights.end(), weights_out);
    if (loss_out) *loss_out = opt.loss;
  });
}

diabens_status diabens_ensemble_load(const char* path, diabens_ensemble** out) {
  return guarded([&] {
    require(path, "path");
    require(out, "out");
    *out = new diabens_ensemble{diabens::load_ensemble(path)};
  });
}

diabens_status diabens_run_command(const diabens_config* config, const char* command, diabens_log_fn log,
                                   void* user) {
  return guarded([&] {
    require(config, "config");
    require(command, "command");
    const diabens::LogSink sink = [&](std::string_view line) {
      if (log) {
        const std::string s(line);
        log(s.c_str(), user);
      }
    };
    const std::string cmd(command);
    const auto& c = config->config;
    if (cmd == "synth") {
      diabens::cmd_synth(c, sink);
    } else if (cmd == "prepare") {
      diabens::cmd_prepare(c, sink);
    } else if (cmd == "train") {
      diabens::cmd_train(c, sink);
    } else if (cmd == "cv") {
      diabens::cmd_cv(c, sink);
    } else if (cmd == "ensemble") {
      diabens::cmd_ensemble(c, sink);
    } else if (cmd == "report") {
      diabens::cmd_report(c, sink);
    } else {
      diabens::throw_usage("unknown command '" + cmd + "'");
    }
  });
}

}  // extern "C"
