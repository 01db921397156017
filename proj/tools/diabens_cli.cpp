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

// Command-line front end. Talks to the library through the C API only.

#include <cstdio>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include <CLI11.hpp>

#include "diabens/diabens.h"

namespace {

struct Flag {
  std::string key;
  std::string value;
  CLI::Option* option = nullptr;
};

class FlagSet {
 public:
  void add(CLI::App* app, const std::string& name, const std::string& key, const std::string& help) {
    flags_.push_back(std::make_unique<Flag>());
    Flag* f = flags_.back().get();
    f->key = key;
    f->option = app->add_option(name, f->value, help);
  }
  void add_bool(CLI::App* app, const std::string& name, const std::string& key, const std::string& help) {
    flags_.push_back(std::make_unique<Flag>());
    Flag* f = flags_.back().get();
    f->key = key;
    f->option = app->add_flag_callback(name, [f] { f->value = "true"; }, help);
  }
  // Flags that were actually given, in registration order.
  std::vector<std::pair<std::string, std::string>> given() const {
    std::vector<std::pair<std::string, std::string>> out;
    for (const auto& f : flags_) {
      if (f->option->count() > 0) out.emplace_back(f->key, f->value);
    }
    return out;
  }

 private:
  std::vector<std::unique_ptr<Flag>> flags_;
};

void print_line(const char* line, void*) {
  std::fputs(line, stdout);
  std::fputc('\n', stdout);
}

int fail(diabens_status status) {
  std::fprintf(stderr, "diabens: %s: %s\n", diabens_status_name(status), diabens_last_error());
  return diabens_exit_code(status);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"diabens: diabetes risk classifiers, evaluation and weighted soft-voting ensembles"};
  app.require_subcommand(1);
  app.set_version_flag("--version", diabens_version());

  FlagSet global;
  std::string config_file;
  app.add_option("--config", config_file, "key=value config file; flags override it");
  global.add(&app, "--seed", "seed", "random seed (default 0)");
  global.add(&app, "--out-dir", "out_dir", "artifact directory (default out)");
  global.add_bool(&app, "--paper-faithful", "paper_faithful", "impute with whole-dataset means");
  std::vector<std::string> sets;
  app.add_option("--set", sets, "extra key=value setting, repeatable (hyperparameters such as knn_k=41)");

  std::vector<std::pair<CLI::App*, FlagSet>> commands;
  auto command = [&](const char* name, const char* help) {
    CLI::App* sub = app.add_subcommand(name, help);
    sub->fallthrough();
    commands.emplace_back(sub, FlagSet{});
    return &commands.back();
  };
  commands.reserve(6);

  auto* synth = command("synth", "write synthetic vitals and demographics CSVs");
  synth->second.add(synth->first, "--patients", "patients", "number of patients (default 2000)");

  auto* prepare = command("prepare", "load, split, impute and standardize raw data");
  prepare->second.add(prepare->first, "--input", "input", "single-table CSV");
  prepare->second.add(prepare->first, "--vitals", "vitals", "per-visit vitals CSV");
  prepare->second.add(prepare->first, "--demographics", "demographics", "per-patient demographics CSV");
  prepare->second.add(prepare->first, "--label-column", "label_column", "label column of --input (default Outcome)");
  prepare->second.add(prepare->first, "--features", "feature_columns", "comma-separated feature columns");
  prepare->second.add(prepare->first, "--zero-missing", "zero_missing", "columns where 0 means missing");
  prepare->second.add(prepare->first, "--test-fraction", "test_fraction", "test share (default 0.25)");

  auto* train = command("train", "train one classifier and append its test metrics to report.csv");
  train->second.add(train->first, "--kind", "kind", "knn, svm, tree, forest, boosting, mlp or nb");
  train->second.add(train->first, "--threshold", "threshold", "decision threshold (default 0.5)");

  auto* cv = command("cv", "k-fold grid search for one classifier");
  cv->second.add(cv->first, "--kind", "kind", "classifier to tune");
  std::vector<std::string> grids;
  auto* grid_opt = cv->first->add_option("--grid", grids, "key=v1,v2 or key=lo..hi, repeatable");
  cv->second.add(cv->first, "--folds", "folds", "fold count (default 5)");
  cv->second.add(cv->first, "--objective", "objective", "metric to optimize (default accuracy)");

  auto* ens = command("ensemble", "build, weight and evaluate a soft-voting ensemble");
  ens->second.add(ens->first, "--exclude", "exclude", "kinds left out of selection (default nb)");
  ens->second.add(ens->first, "--member-count", "member_count", "members to select (default 3)");
  ens->second.add(ens->first, "--members", "members", "explicit member kinds, comma-separated");
  ens->second.add(ens->first, "--weights", "weights", "explicit weights, comma-separated");
  ens->second.add(ens->first, "--validation-fraction", "validation_fraction", "weight-fitting share of train");
  ens->second.add(ens->first, "--folds", "folds", "folds for member selection (default 5)");
  ens->second.add(ens->first, "--threshold", "threshold", "decision threshold (default 0.5)");
  ens->second.add(ens->first, "--from", "from", "re-evaluate a saved ensemble.json");

  command("report", "merge report rows into comparison tables");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return diabens_exit_code(DIABENS_ERR_USAGE);
  }

  diabens_config* config = diabens_config_create();
  if (config == nullptr) return fail(DIABENS_ERR_INTERNAL);
  auto apply = [&](const std::string& key, const std::string& value) {
    return diabens_config_set(config, key.c_str(), value.c_str());
  };

  diabens_status status = DIABENS_OK;
  if (!config_file.empty()) status = diabens_config_load_file(config, config_file.c_str());

  std::vector<std::pair<std::string, std::string>> pending = global.given();
  for (const auto& s : sets) {
    const auto eq = s.find('=');
    if (eq == std::string::npos) {
      std::fprintf(stderr, "diabens: usage error: --set expects key=value, got '%s'\n", s.c_str());
      diabens_config_free(config);
      return diabens_exit_code(DIABENS_ERR_USAGE);
    }
    pending.emplace_back(s.substr(0, eq), s.substr(eq + 1));
  }
  const char* name = nullptr;
  for (auto& [sub, flags] : commands) {
    if (!sub->parsed()) continue;
    name = sub->get_name().c_str();
    for (auto& kv : flags.given()) pending.push_back(std::move(kv));
  }
  if (grid_opt->count() > 0) {
    for (const auto& g : grids) pending.emplace_back("grid", g);
  }
  for (const auto& [k, v] : pending) {
    if (status != DIABENS_OK) break;
    status = apply(k, v);
  }
  if (status == DIABENS_OK) status = diabens_run_command(config, name, print_line, nullptr);
  diabens_config_free(config);
  if (status != DIABENS_OK) return fail(status);
  return 0;
}
