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

#include "diabens/ensemble.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <json.hpp>

#include "diabens/csv.hpp"
#include "diabens/error.hpp"
#include "diabens/random.hpp"
#include "diabens/serialization.hpp"

namespace diabens {

namespace {

constexpr double kWeightGrid = 4294967296.0;  // 2^32

std::vector<double> softmax_weights(std::span<const double> z) {
  // Last logit is pinned at zero.
  double hi = 0.0;
  for (double v : z) hi = std::max(hi, v);
  std::vector<double> w(z.size() + 1);
  double sum = 0.0;
  for (std::size_t i = 0; i < z.size(); ++i) {
    w[i] = std::exp(z[i] - hi);
    sum += w[i];
  }
  w.back() = std::exp(-hi);
  sum += w.back();
  for (double& v : w) v /= sum;
  return w;
}

double ensemble_loss(const Matrix& probas, std::span<const int> labels,
                     std::span<const double> normalized) {
  std::vector<double> p(probas.rows());
  for (std::size_t i = 0; i < probas.rows(); ++i) p[i] = combine_probabilities(normalized, probas.row(i));
  return log_loss(p, labels);
}

}  // namespace

std::vector<double> normalize_weights(std::span<const double> weights) {
  if (weights.empty()) throw_usage("ensemble needs at least one weight");
  double sum = 0.0;
  for (std::size_t i = 0; i < weights.size(); ++i) {
    if (!std::isfinite(weights[i]) || weights[i] < 0.0) {
      throw_usage("ensemble weight " + std::to_string(i + 1) + " must be finite and non-negative");
    }
    sum += weights[i];
  }
  if (!(sum > 0.0) || !std::isfinite(sum)) throw_usage("ensemble weights must not all be zero");
  std::vector<double> out(weights.size());
  for (std::size_t i = 0; i < weights.size(); ++i) {
    out[i] = std::nearbyint(weights[i] / sum * kWeightGrid) / kWeightGrid;
  }
  if (std::all_of(out.begin(), out.end(), [](double v) { return v == 0.0; })) {
    throw_usage("ensemble weights are too small relative to each other");
  }
  // Grid values add exactly, so moving the rounding residual onto the
  // largest weight makes the sum exactly 1 and the mapping idempotent.
  double total = 0.0;
  for (double v : out) total += v;
  const auto largest = std::max_element(out.begin(), out.end());
  *largest += 1.0 - total;
  return out;
}

double combine_probabilities(std::span<const double> normalized_weights,
                             std::span<const double> member_probabilities) {
  if (normalized_weights.size() != member_probabilities.size()) {
    throw_usage("weight count does not match member count");
  }
  double sum = 0.0;
  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  for (std::size_t i = 0; i < normalized_weights.size(); ++i) {
    if (normalized_weights[i] == 0.0) continue;
    sum += normalized_weights[i] * member_probabilities[i];
    lo = std::min(lo, member_probabilities[i]);
    hi = std::max(hi, member_probabilities[i]);
  }
  if (lo > hi) return 0.0;
  return std::clamp(sum, lo, hi);
}

EnsembleModel::EnsembleModel(std::vector<TrainedModel> members, std::vector<double> weights,
                             double threshold)
    : members_(std::move(members)), weights_(std::move(weights)), threshold_(threshold) {
  if (members_.empty()) throw_usage("ensemble needs at least one member");
  if (weights_.size() != members_.size()) {
    throw_usage("ensemble has " + std::to_string(members_.size()) + " members but " +
                std::to_string(weights_.size()) + " weights");
  }
  if (!(threshold_ >= 0.0 && threshold_ <= 1.0)) throw_usage("threshold must lie in [0, 1]");
  for (const auto& m : members_) {
    if (m.feature_count() != members_.front().feature_count()) {
      throw_usage("ensemble members disagree on feature count");
    }
  }
  normalized_ = normalize_weights(weights_);
}

double EnsembleModel::predict_proba(std::span<const double> x) const {
  std::vector<double> p(members_.size());
  for (std::size_t j = 0; j < members_.size(); ++j) {
    p[j] = normalized_[j] == 0.0 ? 0.0 : members_[j].predict_proba(x);
  }
  return combine_probabilities(normalized_, p);
}

int EnsembleModel::predict(std::span<const double> x) const {
  return predict_proba(x) >= threshold_ ? 1 : 0;
}

std::vector<double> EnsembleModel::predict_proba(const Matrix& x) const {
  const Matrix probas = member_probabilities(members_, x);
  std::vector<double> out(x.rows());
  for (std::size_t i = 0; i < x.rows(); ++i) out[i] = combine_probabilities(normalized_, probas.row(i));
  return out;
}

std::vector<int> EnsembleModel::predict(const Matrix& x) const {
  const auto p = predict_proba(x);
  std::vector<int> out(p.size());
  for (std::size_t i = 0; i < p.size(); ++i) out[i] = p[i] >= threshold_ ? 1 : 0;
  return out;
}

Matrix member_probabilities(const std::vector<TrainedModel>& members, const Matrix& x) {
  Matrix out(x.rows(), members.size());
  for (std::size_t j = 0; j < members.size(); ++j) {
    const auto p = members[j].predict_proba(x);
    for (std::size_t i = 0; i < x.rows(); ++i) out(i, j) = p[i];
  }
  return out;
}

WeightOptimization optimize_weights(const Matrix& member_probas, std::span<const int> labels,
                                    std::uint64_t seed, const WeightOptimizerOptions& options) {
  const std::size_t m = member_probas.cols();
  if (m == 0) throw_usage("weight optimization needs at least one member");
  if (member_probas.rows() != labels.size()) {
    throw_usage("probability rows do not match the label count");
  }
  if (labels.empty()) throw_data("weight optimization needs at least one row");
  if (std::all_of(labels.begin(), labels.end(), [&](int y) { return y == labels.front(); })) {
    throw_data("weight optimization needs both classes in the data");
  }

  WeightOptimization best;
  best.member_losses.resize(m);
  for (std::size_t j = 0; j < m; ++j) {
    const auto col = member_probas.column(j);
    best.member_losses[j] = log_loss(col, labels);
  }
  best.loss = std::numeric_limits<double>::infinity();
  std::size_t candidate = 0;
  auto consider = [&](std::vector<double> normalized) {
    const double loss = ensemble_loss(member_probas, labels, normalized);
    if (loss < best.loss) {
      best.loss = loss;
      best.weights = std::move(normalized);
      best.best_start = candidate;
    }
    ++candidate;
  };

  // Exact corners and centre first.
  for (std::size_t j = 0; j < m; ++j) {
    std::vector<double> w(m, 0.0);
    w[j] = 1.0;
    consider(normalize_weights(w));
  }
  if (m == 1) return best;
  consider(normalize_weights(std::vector<double>(m, 1.0)));

  std::vector<std::vector<double>> starts;
  for (std::size_t j = 0; j < m; ++j) {
    std::vector<double> z(m - 1, 0.0);
    if (j + 1 < m) {
      z[j] = options.vertex_logit;
    } else {
      std::fill(z.begin(), z.end(), -options.vertex_logit);
    }
    starts.push_back(std::move(z));
  }
  starts.emplace_back(m - 1, 0.0);
  for (std::size_t r = 0; r < options.random_restarts; ++r) {
    Rng rng(derive_seed(seed, r));
    std::vector<double> z(m - 1);
    for (double& v : z) v = rng.normal(0.0, 2.0);
    starts.push_back(std::move(z));
  }

  const Objective1D objective = [&](std::span<const double> z) {
    return ensemble_loss(member_probas, labels, normalize_weights(softmax_weights(z)));
  };
  for (auto& z : starts) {
    const auto res = nelder_mead(objective, std::move(z), options.nelder_mead);
    consider(normalize_weights(softmax_weights(res.x)));
  }
  return best;
}

WeightOptimization optimize_weights(const std::vector<TrainedModel>& members, const Dataset& data,
                                    std::uint64_t seed, const WeightOptimizerOptions& options) {
  return optimize_weights(member_probabilities(members, data.features), data.labels, seed, options);
}

std::vector<ModelKind> select_members(const std::vector<MemberReport>& reports,
                                      const std::vector<ModelKind>& exclude, std::size_t count) {
  std::vector<const MemberReport*> kept;
  for (const auto& r : reports) {
    if (std::find(exclude.begin(), exclude.end(), r.kind) == exclude.end()) kept.push_back(&r);
  }
  auto loss = [](const MemberReport* r) {
    return r->result.log_loss.mean ? *r->result.log_loss.mean : std::numeric_limits<double>::infinity();
  };
  std::stable_sort(kept.begin(), kept.end(),
                   [&](const MemberReport* a, const MemberReport* b) { return loss(a) < loss(b); });
  if (kept.empty()) throw_usage("every classifier is excluded; nothing left to ensemble");
  std::vector<ModelKind> out;
  for (std::size_t i = 0; i < kept.size() && out.size() < count; ++i) out.push_back(kept[i]->kind);
  return out;
}

MetricReport evaluate_ensemble(const EnsembleModel& ensemble, const Dataset& test) {
  if (test.cols() != ensemble.feature_count()) {
    throw_usage("test data has " + std::to_string(test.cols()) + " features, ensemble expects " +
                std::to_string(ensemble.feature_count()));
  }
  return metric_suite(confusion_matrix(ensemble.predict(test.features), test.labels));
}

std::string ensemble_to_json(const EnsembleDocument& doc) {
  nlohmann::json j = {{"format", "diabens-ensemble"},
                      {"schema_version", kSchemaVersion},
                      {"members", doc.member_files},
                      {"weights", doc.weights},
                      {"threshold", doc.threshold},
                      {"seed", doc.seed}};
  return j.dump(2) + "\n";
}

EnsembleDocument ensemble_from_json(std::string_view text) {
  try {
    const auto j = nlohmann::json::parse(text);
    if (j.at("format").get<std::string>() != "diabens-ensemble") throw_data("not an ensemble document");
    const int version = j.at("schema_version").get<int>();
    if (version != kSchemaVersion) {
      throw_data("unsupported ensemble schema version " + std::to_string(version));
    }
    EnsembleDocument doc;
    doc.member_files = j.at("members").get<std::vector<std::string>>();
    doc.weights = j.at("weights").get<std::vector<double>>();
    doc.threshold = j.at("threshold").get<double>();
    doc.seed = j.at("seed").get<std::uint64_t>();
    if (doc.member_files.size() != doc.weights.size()) {
      throw_data("ensemble document lists " + std::to_string(doc.member_files.size()) + " members but " +
                 std::to_string(doc.weights.size()) + " weights");
    }
    return doc;
  } catch (const nlohmann::json::exception& e) {
    throw_data(std::string("malformed ensemble document: ") + e.what());
  }
}

void save_ensemble(const std::filesystem::path& path, const EnsembleDocument& doc) {
  csv::write_text(path, ensemble_to_json(doc));
}

EnsembleModel load_ensemble(const std::filesystem::path& path) {
  const EnsembleDocument doc = ensemble_from_json(csv::read_text(path));
  const auto base = path.parent_path();
  std::vector<TrainedModel> members;
  for (const auto& f : doc.member_files) members.push_back(load_model(base / f));
  try {
    return EnsembleModel(std::move(members), doc.weights, doc.threshold);
  } catch (const Error& e) {
    throw_data(path.string() + ": " + e.what());
  }
}

}  // namespace diabens
