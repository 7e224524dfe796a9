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

// Small differentiable models and synthetic datasets.
//
//   QUADRATIC  least squares, loss 1/2 (a.theta - b)^2, theta in R^d
//   LOGISTIC   labels y in {-1, +1}, loss log(1 + exp(-y w.x)), w in R^d
//   MLP        one tanh hidden layer of width h, logistic loss on the scalar
//              output. Parameter layout: W1 (h x d, row-major), b1 (h),
//              w2 (h), b2 (1).

#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "hetsgd/core.hpp"

namespace hetsgd {

struct Dataset {
  ModelKind kind = ModelKind::kQuadratic;
  std::int64_t num_samples = 0;
  int feature_dim = 0;
  std::vector<double> features;  // num_samples x feature_dim, row-major
  std::vector<double> targets;   // regression values or +-1 labels
  std::vector<double> holdout_features;
  std::vector<double> holdout_targets;
  std::vector<double> planted;  // generating parameters (empty if not synthetic)
  std::uint64_t seed = 0;

  std::span<const double> row(std::int64_t index) const {
    return {features.data() + index * feature_dim, static_cast<std::size_t>(feature_dim)};
  }
  std::int64_t holdout_size() const {
    return feature_dim == 0 ? 0 : static_cast<std::int64_t>(holdout_targets.size());
  }

  /// Wraps caller-provided rows; no holdout.
  static Dataset from_rows(ModelKind kind, int feature_dim, std::vector<double> features,
                           std::vector<double> targets);
};

struct Model {
  ModelKind kind = ModelKind::kQuadratic;
  int input_dim = 0;
  int hidden_width = 0;  // MLP only
  std::vector<double> params;
  double cost_per_sample = 1.0;

  std::size_t dim() const { return params.size(); }
};

std::size_t param_count(ModelKind kind, int input_dim, int hidden_width);

/// QUADRATIC/LOGISTIC start at zero; MLP weights start small and random.
Model make_model(ModelKind kind, int input_dim, int hidden_width, std::uint64_t seed,
                 double cost_per_sample = 1.0);

/// Deterministic per (kind, n, d, seed, hidden_width). Also draws a holdout
/// set of max(1, n / 4) samples from the same distribution.
///   QUADRATIC: rows ~ N(0, I), b = a.theta_true + 0.1 * noise.
///   LOGISTIC:  rows rejection-sampled until |w.x| >= margin for a planted
///              unit vector w; y = sign(w.x).
///   MLP:       labels are the sign of a random teacher network's output.
Dataset gen_synthetic(ModelKind kind, std::int64_t n, int d, std::uint64_t seed,
                      int hidden_width = 16, double margin = 0.1);

struct LossGrad {
  double loss = 0.0;
  std::vector<double> grad;
};

/// Mean loss over the batch and its analytic gradient at model.params.
LossGrad loss_and_grad(const Model& model, std::span<const std::int64_t> batch,
                       const Dataset& dataset);

/// Same, at an explicit parameter vector.
LossGrad loss_and_grad(const Model& model, std::span<const double> params,
                       std::span<const std::int64_t> batch, const Dataset& dataset);

double batch_loss(const Model& model, std::span<const double> params,
                  std::span<const std::int64_t> batch, const Dataset& dataset);

/// Central differences (f(theta + h e_i) - f(theta - h e_i)) / 2h.
std::vector<double> finite_diff_grad(const Model& model, std::span<const std::int64_t> batch,
                                     const Dataset& dataset, double h);

double full_loss(const Model& model, const Dataset& dataset);
LossGrad full_loss_and_grad(const Model& model, const Dataset& dataset);

/// Fraction of holdout samples classified with the right sign. NaN for
/// QUADRATIC or when there is no holdout set.
double holdout_accuracy(const Model& model, const Dataset& dataset);

/// theta* = pinv(A) b for a QUADRATIC dataset.
std::vector<double> least_squares_minimizer(const Dataset& dataset);

}  // namespace hetsgd
