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

#include <span>
#include <vector>

#include "hetsgd/core.hpp"

namespace hetsgd {

struct GradientMessage {
  int worker_id = 0;
  std::vector<double> gradient;
  double weight = 1.0;
};

// Both reductions visit messages in worker_id order regardless of the order
// they are passed in, so results do not depend on arrival order. The
// parallel policy splits work across coordinates only; each coordinate is
// still summed serially, so it is bitwise equal to the serial policy.

/// Elementwise mean of the gradients.
std::vector<double> allreduce_mean(std::span<const GradientMessage> messages,
                                   ExecutionPolicy policy = ExecutionPolicy::kSerial);

/// sum_m weights[m] * gradient of the message with worker_id m. Weights must
/// be positive and sum to 1 within 1e-9.
std::vector<double> weighted_aggregate(std::span<const GradientMessage> messages,
                                       std::span<const double> weights,
                                       ExecutionPolicy policy = ExecutionPolicy::kSerial);

/// Uses each message's own weight field.
std::vector<double> weighted_aggregate(std::span<const GradientMessage> messages,
                                       ExecutionPolicy policy = ExecutionPolicy::kSerial);

}  // namespace hetsgd
