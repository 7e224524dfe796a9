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

#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "hetsgd/errors.hpp"

namespace hetsgd {

struct OptimizerState {
  OptimizerState() = default;
  explicit OptimizerState(std::size_t dim) : momentum_buffer(dim, 0.0) {}

  std::vector<double> momentum_buffer;
  std::int64_t step_count = 0;
};

struct LrSchedule {
  double eta_max = 0.1;
  double eta_min = 0.0;
  int total_epochs = 1;
};

/// eta_min + (eta_max - eta_min) * (1 + cos(pi * epoch / T)) / 2, for
/// 0 <= epoch <= T. Endpoints are returned exactly.
double cosine_lr(int epoch, const LrSchedule& schedule);

/// SGD with momentum and coupled weight decay, in place:
///   g' = grad + weight_decay * params
///   v  = momentum * v + g'
///   params -= eta * v
void sgd_step(std::span<double> params, std::span<const double> grad, OptimizerState& state,
              double eta, double momentum, double weight_decay);

}  // namespace hetsgd
