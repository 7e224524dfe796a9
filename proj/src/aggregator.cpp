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

#include "hetsgd/aggregator.hpp"

#include <cmath>
#include <cstdint>

#include <fmt/format.h>

namespace hetsgd {

namespace {

// Messages sorted by worker id, checked for a consistent dimension.
std::vector<const GradientMessage*> by_worker(std::span<const GradientMessage> messages) {
  if (messages.empty()) throw EmptyInput("aggregate: no gradient messages");
  const auto workers = messages.size();
  std::vector<const GradientMessage*> ordered(workers, nullptr);
  const auto dim = messages.front().gradient.size();
  for (const auto& message : messages) {
    if (message.worker_id < 0 || static_cast<std::size_t>(message.worker_id) >= workers ||
        ordered[message.worker_id] != nullptr)
      throw DimensionMismatch(
          fmt::format("aggregate: worker ids must be a permutation of 0..{}", workers - 1));
    if (message.gradient.size() != dim)
      throw DimensionMismatch(fmt::format("aggregate: gradient of worker {} has dimension {}, "
                                          "expected {}",
                                          message.worker_id, message.gradient.size(), dim));
    ordered[message.worker_id] = &message;
  }
  return ordered;
}

// out[j] = sum_m coeff[m] * g_m[j] / divisor, each coordinate accumulated in
// worker order.
std::vector<double> reduce(const std::vector<const GradientMessage*>& ordered,
                           std::span<const double> coeff, double divisor, ExecutionPolicy policy) {
  const auto dim = static_cast<std::int64_t>(ordered.front()->gradient.size());
  const auto workers = ordered.size();
  std::vector<double> out(dim, 0.0);
  auto kernel = [&](std::int64_t j) {
    double acc = 0.0;
    for (std::size_t m = 0; m < workers; ++m) acc += coeff[m] * ordered[m]->gradient[j];
    out[j] = acc / divisor;
  };
  if (policy == ExecutionPolicy::kParallel) {
#pragma omp parallel for schedule(static)
    for (std::int64_t j = 0; j < dim; ++j) kernel(j);
  } else {
    for (std::int64_t j = 0; j < dim; ++j) kernel(j);
  }
  return out;
}

void check_weights(std::span<const double> weights, std::size_t workers) {
  if (weights.size() != workers)
    throw DimensionMismatch(
        fmt::format("weighted_aggregate: {} weights for {} workers", weights.size(), workers));
  double total = 0.0;
  for (double w : weights) {
    if (!(w > 0.0) || !std::isfinite(w)) throw InvalidWeights("weighted_aggregate: weights must be > 0");
    total += w;
  }
  if (std::abs(total - 1.0) > 1e-9)
    throw InvalidWeights(fmt::format("weighted_aggregate: weights sum to {}, not 1", total));
}

}  // namespace

std::vector<double> allreduce_mean(std::span<const GradientMessage> messages,
                                   ExecutionPolicy policy) {
  const auto ordered = by_worker(messages);
  const std::vector<double> ones(ordered.size(), 1.0);
  return reduce(ordered, ones, static_cast<double>(ordered.size()), policy);
}

std::vector<double> weighted_aggregate(std::span<const GradientMessage> messages,
                                       std::span<const double> weights, ExecutionPolicy policy) {
  const auto ordered = by_worker(messages);
  check_weights(weights, ordered.size());
  return reduce(ordered, weights, 1.0, policy);
}

std::vector<double> weighted_aggregate(std::span<const GradientMessage> messages,
                                       ExecutionPolicy policy) {
  std::vector<double> weights(messages.size());
  for (const auto& message : messages) {
    if (message.worker_id < 0 || static_cast<std::size_t>(message.worker_id) >= messages.size())
      throw DimensionMismatch("weighted_aggregate: worker id out of range");
    weights[message.worker_id] = message.weight;
  }
  return weighted_aggregate(messages, weights, policy);
}

}  // namespace hetsgd
