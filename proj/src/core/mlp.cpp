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

#include <algorithm>
#include <cmath>
#include <numeric>

#include "diabens/error.hpp"
#include "diabens/models.hpp"
#include "diabens/random.hpp"

namespace diabens {

namespace {

double softplus(double z) { return std::max(z, 0.0) + std::log1p(std::exp(-std::abs(z))); }

}  // namespace

double MlpModel::logit(std::span<const double> x) const {
  std::vector<double> a(x.begin(), x.end());
  std::vector<double> next;
  for (std::size_t l = 0; l < layers.size(); ++l) {
    const auto& layer = layers[l];
    next.assign(layer.outputs, 0.0);
    for (std::size_t o = 0; o < layer.outputs; ++o) {
      double z = layer.bias[o];
      const double* w = layer.weights.data() + o * layer.inputs;
      for (std::size_t i = 0; i < layer.inputs; ++i) z += w[i] * a[i];
      next[o] = l + 1 < layers.size() ? std::max(z, 0.0) : z;
    }
    a.swap(next);
  }
  return a.front();
}

double MlpModel::predict_proba(std::span<const double> x) const { return sigmoid(logit(x)); }

std::size_t MlpModel::parameter_count() const {
  std::size_t n = 0;
  for (const auto& l : layers) n += l.weights.size() + l.bias.size();
  return n;
}

std::vector<double> MlpModel::parameters() const {
  std::vector<double> out;
  out.reserve(parameter_count());
  for (const auto& l : layers) {
    out.insert(out.end(), l.weights.begin(), l.weights.end());
    out.insert(out.end(), l.bias.begin(), l.bias.end());
  }
  return out;
}

void MlpModel::set_parameters(std::span<const double> values) {
  if (values.size() != parameter_count()) throw_usage("MLP parameter vector has the wrong length");
  std::size_t k = 0;
  for (auto& l : layers) {
    for (auto& w : l.weights) w = values[k++];
    for (auto& b : l.bias) b = values[k++];
  }
}

MlpModel init_mlp(std::size_t inputs, const std::vector<int>& hidden_sizes, std::uint64_t seed) {
  if (inputs == 0) throw_usage("MLP needs at least one input");
  std::vector<std::size_t> sizes = {inputs};
  for (int h : hidden_sizes) {
    if (h < 1) throw_usage("MLP hidden layer sizes must be at least 1");
    sizes.push_back(static_cast<std::size_t>(h));
  }
  sizes.push_back(1);
  Rng rng(seed);
  MlpModel model;
  for (std::size_t l = 0; l + 1 < sizes.size(); ++l) {
    MlpLayer layer;
    layer.inputs = sizes[l];
    layer.outputs = sizes[l + 1];
    const double limit = std::sqrt(6.0 / static_cast<double>(layer.inputs));
    layer.weights.resize(layer.inputs * layer.outputs);
    for (auto& w : layer.weights) w = rng.uniform(-limit, limit);
    layer.bias.assign(layer.outputs, 0.0);
    model.layers.push_back(std::move(layer));
  }
  return model;
}

LossGradient mlp_loss_gradient(const MlpModel& model, const Matrix& x, std::span<const int> y,
                               std::span<const std::size_t> rows) {
  LossGradient out;
  out.gradient.assign(model.parameter_count(), 0.0);
  if (rows.empty()) return out;

  // Offsets of each layer's weights and biases in the flat layout.
  std::vector<std::size_t> w_off(model.layers.size());
  std::vector<std::size_t> b_off(model.layers.size());
  std::size_t k = 0;
  for (std::size_t l = 0; l < model.layers.size(); ++l) {
    w_off[l] = k;
    k += model.layers[l].weights.size();
    b_off[l] = k;
    k += model.layers[l].bias.size();
  }

  const double scale = 1.0 / static_cast<double>(rows.size());
  const std::size_t depth = model.layers.size();
  std::vector<std::vector<double>> act(depth + 1);  // act[0] = input, act[l+1] = layer l output
  std::vector<std::vector<double>> pre(depth);
  std::vector<double> delta;
  std::vector<double> prev_delta;
  for (auto r : rows) {
    const auto xr = x.row(r);
    act[0].assign(xr.begin(), xr.end());
    for (std::size_t l = 0; l < depth; ++l) {
      const auto& layer = model.layers[l];
      pre[l].assign(layer.outputs, 0.0);
      act[l + 1].assign(layer.outputs, 0.0);
      for (std::size_t o = 0; o < layer.outputs; ++o) {
        double z = layer.bias[o];
        const double* w = layer.weights.data() + o * layer.inputs;
        for (std::size_t i = 0; i < layer.inputs; ++i) z += w[i] * act[l][i];
        pre[l][o] = z;
        act[l + 1][o] = l + 1 < depth ? std::max(z, 0.0) : z;
      }
    }
    const double z = pre[depth - 1][0];
    const double target = y[r] == 1 ? 1.0 : 0.0;
    out.loss += (softplus(z) - target * z) * scale;

    delta.assign(1, (sigmoid(z) - target) * scale);
    for (std::size_t l = depth; l-- > 0;) {
      const auto& layer = model.layers[l];
      for (std::size_t o = 0; o < layer.outputs; ++o) {
        double* gw = out.gradient.data() + w_off[l] + o * layer.inputs;
        for (std::size_t i = 0; i < layer.inputs; ++i) gw[i] += delta[o] * act[l][i];
        out.gradient[b_off[l] + o] += delta[o];
      }
      if (l == 0) break;
      prev_delta.assign(layer.inputs, 0.0);
      for (std::size_t o = 0; o < layer.outputs; ++o) {
        const double* w = layer.weights.data() + o * layer.inputs;
        for (std::size_t i = 0; i < layer.inputs; ++i) prev_delta[i] += w[i] * delta[o];
      }
      for (std::size_t i = 0; i < layer.inputs; ++i) {
        if (pre[l - 1][i] <= 0.0) prev_delta[i] = 0.0;
      }
      delta.swap(prev_delta);
    }
  }
  return out;
}

LossGradient mlp_loss_gradient(const MlpModel& model, const Matrix& x, std::span<const int> y) {
  std::vector<std::size_t> rows(x.rows());
  std::iota(rows.begin(), rows.end(), std::size_t{0});
  return mlp_loss_gradient(model, x, y, rows);
}

MlpModel train_mlp(const Dataset& train, const MlpOptions& options) {
  validate(train);
  if (train.rows() == 0) throw_data("cannot train an MLP on an empty dataset");
  if (options.epochs < 1) throw_usage("MLP epochs must be at least 1");
  if (options.batch_size < 1) throw_usage("MLP batch size must be at least 1");
  if (!(options.learning_rate > 0.0)) throw_usage("MLP learning rate must be positive");
  if (!(options.momentum >= 0.0 && options.momentum < 1.0)) throw_usage("MLP momentum must lie in [0, 1)");

  MlpModel model = init_mlp(train.cols(), options.hidden_sizes, options.seed);
  std::vector<double> params = model.parameters();
  std::vector<double> velocity(params.size(), 0.0);
  std::vector<std::size_t> order(train.rows());
  std::iota(order.begin(), order.end(), std::size_t{0});
  Rng rng(derive_seed(options.seed, 1));
  const auto batch = static_cast<std::size_t>(options.batch_size);

  for (int epoch = 0; epoch < options.epochs; ++epoch) {
    rng.shuffle(order);
    double epoch_loss = 0.0;
    for (std::size_t start = 0; start < order.size(); start += batch) {
      const std::size_t end = std::min(order.size(), start + batch);
      const std::span<const std::size_t> rows(order.data() + start, end - start);
      const auto lg = mlp_loss_gradient(model, train.features, train.labels, rows);
      epoch_loss += lg.loss * static_cast<double>(rows.size());
      for (std::size_t k = 0; k < params.size(); ++k) {
        velocity[k] = options.momentum * velocity[k] - options.learning_rate * lg.gradient[k];
        params[k] += velocity[k];
      }
      model.set_parameters(params);
    }
    if (!std::isfinite(epoch_loss)) {
      throw_numeric("MLP training diverged: non-finite loss at epoch " + std::to_string(epoch + 1));
    }
  }
  return model;
}

}  // namespace diabens
