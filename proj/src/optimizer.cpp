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

#include "hetsgd/optimizer.hpp"

#include <cmath>
#include <numbers>

#include <fmt/format.h>

namespace hetsgd {

double cosine_lr(int epoch, const LrSchedule& schedule) {
  const int total = schedule.total_epochs;
  if (epoch < 0 || epoch > total)
    throw EpochOutOfRange(fmt::format("cosine_lr: epoch {} outside [0, {}]", epoch, total));
  if (epoch == 0) return schedule.eta_max;
  if (epoch == total) return schedule.eta_min;
  const double phase = std::numbers::pi * static_cast<double>(epoch) / static_cast<double>(total);
  return schedule.eta_min + 0.5 * (schedule.eta_max - schedule.eta_min) * (1.0 + std::cos(phase));
}

void sgd_step(std::span<double> params, std::span<const double> grad, OptimizerState& state,
              double eta, double momentum, double weight_decay) {
  if (grad.size() != params.size() || state.momentum_buffer.size() != params.size())
    throw DimensionMismatch(fmt::format("sgd_step: params {}, grad {}, momentum buffer {}",
                                        params.size(), grad.size(),
                                        state.momentum_buffer.size()));
  auto& velocity = state.momentum_buffer;
  for (std::size_t i = 0; i < params.size(); ++i) {
    const double g = grad[i] + weight_decay * params[i];
    velocity[i] = momentum * velocity[i] + g;
    params[i] -= eta * velocity[i];
  }
  ++state.step_count;
}

}  // namespace hetsgd
