/* Copyright 2026 The hetsgd Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include "hetsgd/trainkit.hpp"

#include <cmath>
#include <limits>
#include <random>

#include <Eigen/Dense>
#include <fmt/format.h>

namespace hetsgd {

namespace {

using Rng64 = std::mt19937_64;

Rng64 dataset_rng(ModelKind kind, std::int64_t n, int d, std::uint64_t seed) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(kind), static_cast<std::uint32_t>(n),
                    static_cast<std::uint32_t>(d)};
  return Rng64(seq);
}

double dot(std::span<const double> a, std::span<const double> b) {
  double acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) acc += a[i] * b[i];
  return acc;
}

// log(1 + exp(-z)) without overflow.
double softplus_neg(double z) {
  return z > 0.0 ? std::log1p(std::exp(-z)) : -z + std::log1p(std::exp(z));
}

// d/dz log(1 + exp(-z)) = -1 / (1 + exp(z)).
double softplus_neg_slope(double z) {
  if (z > 0.0) {
    const double e = std::exp(-z);
    return -e / (1.0 + e);
  }
  return -1.0 / (1.0 + std::exp(z));
}

struct MlpView {
  int d;
  int h;
  std::span<const double> params;
  double w1(int k, int i) const { return params[k * d + i]; }
  double b1(int k) const { return params[h * d + k]; }
  double w2(int k) const { return params[h * d + h + k]; }
  double b2() const { return params[h * d + 2 * h]; }
};

// Scalar network output; fills hidden activations when requested.
double mlp_forward(const MlpView& net, std::span<const double> x, std::vector<double>* hidden) {
  double out = net.b2();
  for (int k = 0; k < net.h; ++k) {
    double a = net.b1(k);
    for (int i = 0; i < net.d; ++i) a += net.w1(k, i) * x[i];
    const double t = std::tanh(a);
    if (hidden) (*hidden)[k] = t;
    out += net.w2(k) * t;
  }
  return out;
}

double predict(const Model& model, std::span<const double> params, std::span<const double> x) {
  if (model.kind == ModelKind::kMlp)
    return mlp_forward({model.input_dim, model.hidden_width, params}, x, nullptr);
  return dot(params, x);
}

void check_batch(const Model& model, std::span<const double> params,
                 std::span<const std::int64_t> batch, const Dataset& dataset) {
  if (batch.empty()) throw EmptyInput("loss_and_grad: empty batch");
  if (params.size() != param_count(model.kind, model.input_dim, model.hidden_width) ||
      model.input_dim != dataset.feature_dim)
    throw DimensionMismatch("loss_and_grad: model does not match dataset");
  for (auto index : batch)
    if (index < 0 || index >= dataset.num_samples)
      throw IndexOutOfRange(fmt::format("loss_and_grad: row {} outside [0, {})", index,
                                        dataset.num_samples));
}

void fill_normal(std::vector<double>& out, std::size_t count, double stddev, Rng64& rng) {
  std::normal_distribution<double> normal(0.0, stddev);
  for (std::size_t i = 0; i < count; ++i) out.push_back(normal(rng));
}

}  // namespace

Dataset Dataset::from_rows(ModelKind kind, int feature_dim, std::vector<double> features,
                           std::vector<double> targets) {
  if (feature_dim < 1 || features.size() != targets.size() * feature_dim)
    throw DimensionMismatch("Dataset::from_rows: features are not targets x feature_dim");
  Dataset ds;
  ds.kind = kind;
  ds.feature_dim = feature_dim;
  ds.num_samples = static_cast<std::int64_t>(targets.size());
  ds.features = std::move(features);
  ds.targets = std::move(targets);
  return ds;
}

std::size_t param_count(ModelKind kind, int input_dim, int hidden_width) {
  if (kind == ModelKind::kMlp)
    return static_cast<std::size_t>(hidden_width) * (input_dim + 2) + 1;
  return static_cast<std::size_t>(input_dim);
}

Model make_model(ModelKind kind, int input_dim, int hidden_width, std::uint64_t seed,
                 double cost_per_sample) {
  Model model;
  model.kind = kind;
  model.input_dim = input_dim;
  model.hidden_width = kind == ModelKind::kMlp ? hidden_width : 0;
  model.cost_per_sample = cost_per_sample;
  if (kind != ModelKind::kMlp) {
    model.params.assign(input_dim, 0.0);
    return model;
  }
  Rng64 rng(seed ^ 0x9e3779b97f4a7c15ULL);
  const auto h = static_cast<std::size_t>(hidden_width);
  model.params.reserve(param_count(kind, input_dim, hidden_width));
  fill_normal(model.params, h * input_dim, 1.0 / std::sqrt(static_cast<double>(input_dim)), rng);
  model.params.insert(model.params.end(), h, 0.0);
  fill_normal(model.params, h, 1.0 / std::sqrt(static_cast<double>(hidden_width)), rng);
  model.params.push_back(0.0);
  return model;
}

Dataset gen_synthetic(ModelKind kind, std::int64_t n, int d, std::uint64_t seed, int hidden_width,
                      double margin) {
  if (n < 1 || d < 1) throw DimensionMismatch("gen_synthetic: n and d must be >= 1");
  Rng64 rng = dataset_rng(kind, n, d, seed);
  std::normal_distribution<double> normal(0.0, 1.0);

  Dataset ds;
  ds.kind = kind;
  ds.num_samples = n;
  ds.feature_dim = d;
  ds.seed = seed;

  switch (kind) {
    case ModelKind::kQuadratic:
      fill_normal(ds.planted, d, 1.0, rng);
      break;
    case ModelKind::kLogistic: {
      fill_normal(ds.planted, d, 1.0, rng);
      const double norm = std::sqrt(dot(ds.planted, ds.planted));
      for (auto& w : ds.planted) w /= norm;
      break;
    }
    case ModelKind::kMlp: {
      const auto h = static_cast<std::size_t>(hidden_width);
      fill_normal(ds.planted, h * d, 1.0 / std::sqrt(static_cast<double>(d)), rng);
      fill_normal(ds.planted, h, 0.1, rng);
      fill_normal(ds.planted, h, 1.0 / std::sqrt(static_cast<double>(hidden_width)), rng);
      ds.planted.push_back(0.0);
      break;
    }
  }

  std::vector<double> x(d);
  auto draw = [&](std::vector<double>& features, std::vector<double>& targets) {
    for (;;) {
      for (auto& v : x) v = normal(rng);
      if (kind == ModelKind::kQuadratic) {
        features.insert(features.end(), x.begin(), x.end());
        targets.push_back(dot(ds.planted, x) + 0.1 * normal(rng));
        return;
      }
      const double score = kind == ModelKind::kLogistic
                               ? dot(ds.planted, x)
                               : mlp_forward({d, hidden_width, ds.planted}, x, nullptr);
      if (kind == ModelKind::kLogistic && std::abs(score) < margin) continue;
      if (score == 0.0) continue;
      features.insert(features.end(), x.begin(), x.end());
      targets.push_back(score > 0.0 ? 1.0 : -1.0);
      return;
    }
  };

  ds.features.reserve(static_cast<std::size_t>(n) * d);
  ds.targets.reserve(n);
  for (std::int64_t i = 0; i < n; ++i) draw(ds.features, ds.targets);
  const std::int64_t holdout = std::max<std::int64_t>(1, n / 4);
  for (std::int64_t i = 0; i < holdout; ++i) draw(ds.holdout_features, ds.holdout_targets);
  return ds;
}

LossGrad loss_and_grad(const Model& model, std::span<const std::int64_t> batch,
                       const Dataset& dataset) {
  return loss_and_grad(model, model.params, batch, dataset);
}

LossGrad loss_and_grad(const Model& model, std::span<const double> params,
                       std::span<const std::int64_t> batch, const Dataset& dataset) {
  check_batch(model, params, batch, dataset);
  LossGrad out;
  out.grad.assign(params.size(), 0.0);
  const double inv = 1.0 / static_cast<double>(batch.size());

  switch (model.kind) {
    case ModelKind::kQuadratic:
      for (auto index : batch) {
        const auto x = dataset.row(index);
        const double r = dot(params, x) - dataset.targets[index];
        out.loss += 0.5 * r * r;
        for (std::size_t i = 0; i < x.size(); ++i) out.grad[i] += r * x[i];
      }
      break;
    case ModelKind::kLogistic:
      for (auto index : batch) {
        const auto x = dataset.row(index);
        const double y = dataset.targets[index];
        const double z = y * dot(params, x);
        out.loss += softplus_neg(z);
        const double scale = softplus_neg_slope(z) * y;
        for (std::size_t i = 0; i < x.size(); ++i) out.grad[i] += scale * x[i];
      }
      break;
    case ModelKind::kMlp: {
      const MlpView net{model.input_dim, model.hidden_width, params};
      const int d = net.d;
      const int h = net.h;
      std::vector<double> hidden(h);
      for (auto index : batch) {
        const auto x = dataset.row(index);
        const double y = dataset.targets[index];
        const double z = y * mlp_forward(net, x, &hidden);
        out.loss += softplus_neg(z);
        const double delta = softplus_neg_slope(z) * y;  // dL/d(output)
        for (int k = 0; k < h; ++k) {
          const double back = delta * net.w2(k) * (1.0 - hidden[k] * hidden[k]);
          for (int i = 0; i < d; ++i) out.grad[k * d + i] += back * x[i];
          out.grad[h * d + k] += back;
          out.grad[h * d + h + k] += delta * hidden[k];
        }
        out.grad[h * d + 2 * h] += delta;
      }
      break;
    }
  }

  out.loss *= inv;
  for (auto& g : out.grad) g *= inv;
  return out;
}

double batch_loss(const Model& model, std::span<const double> params,
                  std::span<const std::int64_t> batch, const Dataset& dataset) {
  check_batch(model, params, batch, dataset);
  double total = 0.0;
  for (auto index : batch) {
    const double p = predict(model, params, dataset.row(index));
    const double y = dataset.targets[index];
    total += model.kind == ModelKind::kQuadratic ? 0.5 * (p - y) * (p - y) : softplus_neg(y * p);
  }
  return total / static_cast<double>(batch.size());
}

std::vector<double> finite_diff_grad(const Model& model, std::span<const std::int64_t> batch,
                                     const Dataset& dataset, double h) {
  std::vector<double> theta = model.params;
  std::vector<double> grad(theta.size());
  for (std::size_t i = 0; i < theta.size(); ++i) {
    const double saved = theta[i];
    theta[i] = saved + h;
    const double up = batch_loss(model, theta, batch, dataset);
    theta[i] = saved - h;
    const double down = batch_loss(model, theta, batch, dataset);
    theta[i] = saved;
    grad[i] = (up - down) / (2.0 * h);
  }
  return grad;
}

namespace {

std::vector<std::int64_t> all_rows(const Dataset& dataset) {
  std::vector<std::int64_t> rows(dataset.num_samples);
  for (std::int64_t i = 0; i < dataset.num_samples; ++i) rows[i] = i;
  return rows;
}

}  // namespace

double full_loss(const Model& model, const Dataset& dataset) {
  return batch_loss(model, model.params, all_rows(dataset), dataset);
}

LossGrad full_loss_and_grad(const Model& model, const Dataset& dataset) {
  return loss_and_grad(model, all_rows(dataset), dataset);
}

double holdout_accuracy(const Model& model, const Dataset& dataset) {
  const auto count = dataset.holdout_size();
  if (model.kind == ModelKind::kQuadratic || count == 0)
    return std::numeric_limits<double>::quiet_NaN();
  std::int64_t correct = 0;
  for (std::int64_t i = 0; i < count; ++i) {
    const std::span<const double> x(dataset.holdout_features.data() + i * dataset.feature_dim,
                                    static_cast<std::size_t>(dataset.feature_dim));
    const double p = predict(model, model.params, x);
    if ((p > 0.0 ? 1.0 : -1.0) == dataset.holdout_targets[i]) ++correct;
  }
  return static_cast<double>(correct) / static_cast<double>(count);
}

std::vector<double> least_squares_minimizer(const Dataset& dataset) {
  using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
  const Eigen::Map<const RowMatrix> a(dataset.features.data(), dataset.num_samples,
                                      dataset.feature_dim);
  const Eigen::Map<const Eigen::VectorXd> b(dataset.targets.data(), dataset.num_samples);
  const Eigen::VectorXd theta = a.completeOrthogonalDecomposition().solve(b);
  return {theta.data(), theta.data() + theta.size()};
}

}  // namespace hetsgd
