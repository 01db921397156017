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

#include <doctest.h>

#include <filesystem>

#include "diabens/csv.hpp"
#include "diabens/error.hpp"
#include "diabens/pipeline.hpp"
#include "fixtures.hpp"

using namespace diabens;
namespace fs = std::filesystem;

namespace {

const fs::path kPima = fs::path(DIABENS_DATA_DIR) / "pima_indians_diabetes.csv";
const LogSink kQuiet = [](std::string_view) {};

RunConfig pima_config(const fs::path& out) {
  RunConfig c;
  c.input = kPima;
  c.out_dir = out;
  c.seed = 5;
  c.params.seed = 5;
  return c;
}

ErrorKind kind_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.kind();
  }
  FAIL("expected an error");
  return ErrorKind::Usage;
}

std::size_t data_rows(const fs::path& p) { return csv::read(p).rows.size(); }

}  // namespace

TEST_CASE("config values from text and flags") {
  RunConfig c;
  apply_config_text(c, "# comment\nseed = 7\n\nknn-k=12  # trailing\nexclude=nb,mlp\ngrid=knn_k=1,2\ngrid=knn_k..\n");
  CHECK(c.seed == 7);
  CHECK(c.params.seed == 7);
  CHECK(c.params.knn_k == 12);
  CHECK(c.exclude == std::vector<std::string>{"nb", "mlp"});
  CHECK(c.grid.size() == 2);
  set_config_value(c, "paper-faithful", "true");
  CHECK(c.paper_faithful);
  set_config_value(c, "exclude", "");
  CHECK(c.exclude.empty());

  CHECK(kind_of([&] { set_config_value(c, "no_such_key", "1"); }) == ErrorKind::Usage);
  CHECK(kind_of([&] { set_config_value(c, "test_fraction", "1.5"); }) == ErrorKind::Usage);
  CHECK(kind_of([&] { set_config_value(c, "folds", "x"); }) == ErrorKind::Usage);
  CHECK(kind_of([&] { set_config_value(c, "members", "knn,lasso"); }) == ErrorKind::Usage);
  try {
    apply_config_text(c, "seed=1\nbroken line\n");
    FAIL("expected error");
  } catch (const Error& e) {
    CHECK(std::string(e.what()).find("line 2") != std::string::npos);
  }
  CHECK(kind_of([&] { apply_config_file(c, "/nonexistent.cfg"); }) == ErrorKind::Usage);
}

TEST_CASE("prepare writes 8-feature Pima splits and provenance") {
  const auto out = fixtures::temp_dir("prepare_pima");
  const std::string before = csv::read_text(kPima);
  cmd_prepare(pima_config(out), kQuiet);
  const auto train = csv::read(out / "train.csv");
  CHECK(train.header.size() == 9);
  CHECK(train.header.back() == "label");
  CHECK(train.rows.size() == 576);
  CHECK(data_rows(out / "test.csv") == 192);
  const std::string prov = csv::read_text(out / "provenance.json");
  CHECK(prov.find("\"seed\": 5") != std::string::npos);
  CHECK(prov.find("imputation_means") != std::string::npos);
  CHECK(prov.find("schema_version") != std::string::npos);
  CHECK(csv::read_text(kPima) == before);

  const auto again = fixtures::temp_dir("prepare_pima_again");
  cmd_prepare(pima_config(again), kQuiet);
  for (const char* f : {"train.csv", "test.csv", "provenance.json"}) {
    CHECK(csv::read_text(out / f) == csv::read_text(again / f));
  }
}

TEST_CASE("prepare handles the vitals path with 17 features") {
  const auto out = fixtures::temp_dir("prepare_vitals");
  RunConfig c;
  c.out_dir = out;
  c.patients = 300;
  cmd_synth(c, kQuiet);
  c.vitals = out / "vitals.csv";
  c.demographics = out / "demographics.csv";
  cmd_prepare(c, kQuiet);
  const auto train = csv::read(out / "train.csv");
  CHECK(train.header.size() == 18);
  CHECK(train.rows.size() + data_rows(out / "test.csv") == 300);
}

TEST_CASE("prepare argument errors") {
  const auto out = fixtures::temp_dir("prepare_errors");
  RunConfig c;
  c.out_dir = out;
  CHECK(kind_of([&] { cmd_prepare(c, kQuiet); }) == ErrorKind::Usage);
  c.input = out / "missing.csv";
  CHECK(kind_of([&] { cmd_prepare(c, kQuiet); }) == ErrorKind::Io);
  c.input = kPima;
  c.label_column = "Nope";
  CHECK(kind_of([&] { cmd_prepare(c, kQuiet); }) == ErrorKind::Data);
}

TEST_CASE("train appends ordered report rows") {
  const auto out = fixtures::temp_dir("train_rows");
  RunConfig c = pima_config(out);
  cmd_prepare(c, kQuiet);
  c.kind = "tree";
  cmd_train(c, kQuiet);
  c.kind = "nb";
  cmd_train(c, kQuiet);
  const auto report = csv::read(out / "report.csv");
  REQUIRE(report.rows.size() == 2);
  CHECK(report.header[0] == "classifier");
  CHECK(report.rows[0][0] == "Decision Tree");
  CHECK(report.rows[1][0] == "Naive Bayes");
  CHECK(report.rows[0][1].size() == 6);  // 0.xxxx
  CHECK(fs::exists(out / "models" / "tree.json"));

  c.kind = "lasso";
  CHECK(kind_of([&] { cmd_train(c, kQuiet); }) == ErrorKind::Usage);
  c.kind = "";
  CHECK(kind_of([&] { cmd_train(c, kQuiet); }) == ErrorKind::Usage);

  RunConfig fresh = pima_config(fixtures::temp_dir("train_unprepared"));
  fresh.kind = "tree";
  CHECK(kind_of([&] { cmd_train(fresh, kQuiet); }) == ErrorKind::Io);
}

TEST_CASE("cv sweep writes one curve row per value") {
  const auto out = fixtures::temp_dir("cv_sweep");
  RunConfig c = pima_config(out);
  cmd_prepare(c, kQuiet);
  c.kind = "knn";
  c.grid = {"knn_k=1..60"};
  cmd_cv(c, kQuiet);
  CHECK(data_rows(out / "curve_knn_knn_k.csv") == 60);
  CHECK(data_rows(out / "cv_knn.csv") == 60);
  const std::string first = csv::read_text(out / "cv_knn.csv");
  cmd_cv(c, kQuiet);
  CHECK(csv::read_text(out / "cv_knn.csv") == first);
  CHECK(fs::exists(out / "best_knn.cfg"));

  c.grid = {"knn_k="};
  CHECK(kind_of([&] { cmd_cv(c, kQuiet); }) == ErrorKind::Usage);
  c.grid = {"tree_max_depth=1,2"};
  CHECK(kind_of([&] { cmd_cv(c, kQuiet); }) == ErrorKind::Usage);
  c.grid = {"knn_k=5..1"};
  CHECK(kind_of([&] { cmd_cv(c, kQuiet); }) == ErrorKind::Usage);
}

TEST_CASE("ensemble, reload and report") {
  const auto out = fixtures::temp_dir("ensemble_flow");
  RunConfig c = pima_config(out);
  c.params.forest_n_trees = 40;
  cmd_prepare(c, kQuiet);

  c.kind = "knn";
  cmd_train(c, kQuiet);
  cmd_report(c, kQuiet);
  CHECK(csv::read_text(out / "comparison.txt").find("no ensemble report") != std::string::npos);
  CHECK(data_rows(out / "comparison.csv") == 1);

  for (const char* k : {"svm", "tree", "forest", "boosting", "mlp", "nb"}) {
    c.kind = k;
    cmd_train(c, kQuiet);
  }
  cmd_report(c, kQuiet);
  CHECK(data_rows(out / "comparison.csv") == 7);

  std::vector<std::string> logged;
  cmd_ensemble(c, [&](std::string_view l) { logged.emplace_back(l); });
  const auto weights = csv::read(out / "ensemble_weights.csv");
  CHECK(weights.rows.size() == 3);
  for (const auto& r : weights.rows) CHECK(r[0] != "nb");
  std::size_t weight_lines = 0;
  for (const auto& l : logged) weight_lines += l.rfind("weight ", 0) == 0 ? 1 : 0;
  CHECK(weight_lines == 3);

  const std::string report = csv::read_text(out / "ensemble_report.csv");
  RunConfig reload = c;
  reload.from = out / "ensemble.json";
  cmd_ensemble(reload, kQuiet);
  CHECK(csv::read_text(out / "ensemble_report.csv") == report);

  cmd_report(c, kQuiet);
  const auto cmp = csv::read(out / "comparison.csv");
  CHECK(cmp.rows.size() == 8);
  CHECK(cmp.header == std::vector<std::string>{"classifier", "accuracy", "precision", "negative_prediction",
                                               "sensitivity", "specificity", "f1_score", "seed",
                                               "schema_version"});
  CHECK(cmp.rows.back()[0].rfind("Ensemble", 0) == 0);
  CHECK(data_rows(out / "comparison_long.csv") == 48);

  RunConfig all_out = c;
  all_out.exclude = {"knn", "svm", "tree", "forest", "boosting", "mlp", "nb"};
  CHECK(kind_of([&] { cmd_ensemble(all_out, kQuiet); }) == ErrorKind::Usage);
  RunConfig bad_weights = c;
  bad_weights.members = {"knn", "nb"};
  bad_weights.weights = {1, 2, 3};
  CHECK(kind_of([&] { cmd_ensemble(bad_weights, kQuiet); }) == ErrorKind::Usage);
}

TEST_CASE("report without rows is an error") {
  RunConfig c;
  c.out_dir = fixtures::temp_dir("report_empty");
  CHECK(kind_of([&] { cmd_report(c, kQuiet); }) == ErrorKind::Data);
}
