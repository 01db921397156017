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

#include "diabens/serialization.hpp"

#include <algorithm>

#include <json.hpp>

#include "diabens/csv.hpp"
#include "diabens/error.hpp"

namespace diabens {

using nlohmann::json;

namespace {

json tree_to_json(const DecisionTree& t) {
  json features = json::array(), thresholds = json::array(), lefts = json::array(),
       rights = json::array(), values = json::array(), samples = json::array();
  for (const auto& n : t.nodes) {
    features.push_back(n.feature);
    thresholds.push_back(n.threshold);
    lefts.push_back(n.left);
    rights.push_back(n.right);
    values.push_back(n.value);
    samples.push_back(n.samples);
  }
  return {{"feature_count", t.feature_count},
          {"feature", features},
          {"threshold", thresholds},
          {"left", lefts},
          {"right", rights},
          {"value", values},
          {"samples", samples},
          {"impurity_decrease", t.impurity_decrease}};
}

DecisionTree tree_from_json(const json& j) {
  DecisionTree t;
  t.feature_count = j.at("feature_count").get<std::size_t>();
  t.impurity_decrease = j.at("impurity_decrease").get<std::vector<double>>();
  const auto& f = j.at("feature");
  const std::size_t n = f.size();
  t.nodes.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    auto& node = t.nodes[i];
    node.feature = f.at(i).get<std::int32_t>();
    node.threshold = j.at("threshold").at(i).get<double>();
    node.left = j.at("left").at(i).get<std::int32_t>();
    node.right = j.at("right").at(i).get<std::int32_t>();
    node.value = j.at("value").at(i).get<double>();
    node.samples = j.at("samples").at(i).get<std::uint64_t>();
    if (!node.is_leaf()) {
      const auto limit = static_cast<std::int32_t>(n);
      if (node.left <= static_cast<std::int32_t>(i) || node.right <= static_cast<std::int32_t>(i) ||
          node.left >= limit || node.right >= limit ||
          static_cast<std::size_t>(node.feature) >= t.feature_count) {
        throw_data("corrupt tree: bad child or feature index at node " + std::to_string(i));
      }
    }
  }
  if (n == 0) throw_data("corrupt tree: no nodes");
  return t;
}

json state_to_json(const ModelState& state) {
  return std::visit(
      [](const auto& m) -> json {
        using T = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<T, KnnModel>) {
          json points = json::array();
          for (std::size_t i = 0; i < m.points.rows(); ++i) {
            const auto r = m.points.row(i);
            points.push_back(std::vector<double>(r.begin(), r.end()));
          }
          return {{"k", m.k}, {"points", points}, {"labels", m.labels}};
        } else if constexpr (std::is_same_v<T, LinearSvmModel>) {
          return {{"weights", m.weights},
                  {"bias", m.bias},
                  {"platt_scale", m.platt_scale},
                  {"platt_offset", m.platt_offset}};
        } else if constexpr (std::is_same_v<T, DecisionTree>) {
          return tree_to_json(m);
        } else if constexpr (std::is_same_v<T, RandomForestModel>) {
          json trees = json::array();
          for (const auto& t : m.trees) trees.push_back(tree_to_json(t));
          return {{"trees", trees}};
        } else if constexpr (std::is_same_v<T, GradientBoostingModel>) {
          json stages = json::array();
          for (const auto& t : m.stages) stages.push_back(tree_to_json(t));
          return {{"initial_log_odds", m.initial_log_odds},
                  {"learning_rate", m.learning_rate},
                  {"stages", stages}};
        } else if constexpr (std::is_same_v<T, MlpModel>) {
          json layers = json::array();
          for (const auto& l : m.layers) {
            layers.push_back({{"inputs", l.inputs},
                              {"outputs", l.outputs},
                              {"weights", l.weights},
                              {"bias", l.bias}});
          }
          return {{"layers", layers}};
        } else {
          return {{"log_prior", m.log_prior}, {"mean", m.mean}, {"variance", m.variance}};
        }
      },
      state);
}

ModelState state_from_json(ModelKind kind, const json& j) {
  switch (kind) {
    case ModelKind::Knn: {
      KnnModel m;
      m.k = j.at("k").get<int>();
      m.labels = j.at("labels").get<std::vector<int>>();
      for (const auto& row : j.at("points")) m.points.append_row(row.get<std::vector<double>>());
      if (m.labels.size() != m.points.rows() || m.k < 1 || static_cast<std::size_t>(m.k) > m.labels.size()) {
        throw_data("corrupt kNN model");
      }
      return m;
    }
    case ModelKind::LinearSvm: {
      LinearSvmModel m;
      m.weights = j.at("weights").get<std::vector<double>>();
      m.bias = j.at("bias").get<double>();
      m.platt_scale = j.at("platt_scale").get<double>();
      m.platt_offset = j.at("platt_offset").get<double>();
      return m;
    }
    case ModelKind::DecisionTree: return tree_from_json(j);
    case ModelKind::RandomForest: {
      RandomForestModel m;
      for (const auto& t : j.at("trees")) m.trees.push_back(tree_from_json(t));
      if (m.trees.empty()) throw_data("corrupt forest: no trees");
      return m;
    }
    case ModelKind::GradientBoosting: {
      GradientBoostingModel m;
      m.initial_log_odds = j.at("initial_log_odds").get<double>();
      m.learning_rate = j.at("learning_rate").get<double>();
      for (const auto& t : j.at("stages")) m.stages.push_back(tree_from_json(t));
      return m;
    }
    case ModelKind::Mlp: {
      MlpModel m;
      for (const auto& l : j.at("layers")) {
        MlpLayer layer;
        layer.inputs = l.at("inputs").get<std::size_t>();
        layer.outputs = l.at("outputs").get<std::size_t>();
        layer.weights = l.at("weights").get<std::vector<double>>();
        layer.bias = l.at("bias").get<std::vector<double>>();
        if (layer.weights.size() != layer.inputs * layer.outputs || layer.bias.size() != layer.outputs) {
          throw_data("corrupt MLP layer");
        }
        m.layers.push_back(std::move(layer));
      }
      if (m.layers.empty() || m.layers.back().outputs != 1) throw_data("corrupt MLP: bad output layer");
      return m;
    }
    case ModelKind::GaussianNb: {
      GaussianNbModel m;
      m.log_prior = j.at("log_prior").get<std::array<double, 2>>();
      m.mean = j.at("mean").get<std::array<std::vector<double>, 2>>();
      m.variance = j.at("variance").get<std::array<std::vector<double>, 2>>();
      return m;
    }
  }
  throw_data("unknown model kind");
}

// Checks every learned array against the declared feature count so a corrupt
// file fails here instead of reading out of bounds at predict time.
void check_state_dimension(const ModelState& state, std::size_t d) {
  auto tree_ok = [d](const DecisionTree& t) { return t.feature_count == d && t.impurity_decrease.size() == d; };
  const bool ok = std::visit(
      [&](const auto& m) -> bool {
        using T = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<T, KnnModel>) {
          return m.points.cols() == d;
        } else if constexpr (std::is_same_v<T, LinearSvmModel>) {
          return m.weights.size() == d;
        } else if constexpr (std::is_same_v<T, DecisionTree>) {
          return tree_ok(m);
        } else if constexpr (std::is_same_v<T, RandomForestModel>) {
          return std::all_of(m.trees.begin(), m.trees.end(), tree_ok);
        } else if constexpr (std::is_same_v<T, GradientBoostingModel>) {
          return std::all_of(m.stages.begin(), m.stages.end(), tree_ok);
        } else if constexpr (std::is_same_v<T, MlpModel>) {
          std::size_t in = d;
          for (const auto& l : m.layers) {
            if (l.inputs != in) return false;
            in = l.outputs;
          }
          return true;
        } else {
          for (int c = 0; c < 2; ++c) {
            if (m.mean[c].size() != d || m.variance[c].size() != d) return false;
            for (double v : m.variance[c]) {
              if (!(v > 0.0)) return false;
            }
          }
          return true;
        }
      },
      state);
  if (!ok) throw_data("model parameters do not match its " + std::to_string(d) + " feature names");
}

}  // namespace

std::string model_to_json(const TrainedModel& model) {
  json hp = json::object();
  for (const auto& key : hyperparam_keys()) hp[key] = get_hyperparam(model.hyperparams(), key);
  json doc = {{"format", "diabens-model"},
              {"schema_version", kSchemaVersion},
              {"model_kind", std::string(kind_key(model.kind()))},
              {"feature_names", model.feature_names()},
              {"hyperparameters", hp},
              {"parameters", state_to_json(model.state())}};
  if (const auto& s = model.standardizer()) {
    doc["standardizer"] = {{"mean", s->mean}, {"stddev", s->stddev}, {"constant", s->constant}};
  } else {
    doc["standardizer"] = nullptr;
  }
  return doc.dump(1) + "\n";
}

TrainedModel model_from_json(std::string_view text) {
  try {
    const json doc = json::parse(text);
    if (doc.at("format").get<std::string>() != "diabens-model") throw_data("not a diabens model document");
    const int version = doc.at("schema_version").get<int>();
    if (version < 1 || version > kSchemaVersion) {
      throw_data("unsupported model schema version " + std::to_string(version));
    }
    const auto kind = parse_kind(doc.at("model_kind").get<std::string>());
    if (!kind) throw_data("unknown model kind '" + doc.at("model_kind").get<std::string>() + "'");
    HyperParams hp;
    for (const auto& [key, value] : doc.at("hyperparameters").items()) {
      try {
        set_hyperparam(hp, key, value.get<std::string>());
      } catch (const Error& e) {
        throw_data(std::string("bad hyperparameter: ") + e.what());
      }
    }
    auto names = doc.at("feature_names").get<std::vector<std::string>>();
    ModelState state = state_from_json(*kind, doc.at("parameters"));
    check_state_dimension(state, names.size());
    TrainedModel model(std::move(state), hp, std::move(names));
    if (const auto& s = doc.at("standardizer"); !s.is_null()) {
      StandardizerParams p;
      p.mean = s.at("mean").get<std::vector<double>>();
      p.stddev = s.at("stddev").get<std::vector<double>>();
      p.constant = s.at("constant").get<std::vector<bool>>();
      model.set_standardizer(std::move(p));
    }
    return model;
  } catch (const json::exception& e) {
    throw_data(std::string("malformed model document: ") + e.what());
  }
}

void save_model(const std::filesystem::path& path, const TrainedModel& model) {
  csv::write_text(path, model_to_json(model));
}

TrainedModel load_model(const std::filesystem::path& path) {
  try {
    return model_from_json(csv::read_text(path));
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::Data) throw_data(path.string() + ": " + e.what());
    throw;
  }
}

}  // namespace diabens
