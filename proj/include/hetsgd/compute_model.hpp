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

#include <cstdint>
#include <random>
#include <span>
#include <vector>

#include "hetsgd/core.hpp"

namespace hetsgd {

using Rng = std::mt19937_64;

/// Independent stream for one worker's timing jitter: seed xor worker_id.
inline Rng worker_rng(std::uint64_t seed, int worker_id) {
  return Rng(seed ^ static_cast<std::uint64_t>(worker_id));
}

/// Noise-free batch time: batch_size * cost_per_sample / speed + delay.
double base_batch_time(const WorkerProfile& profile, std::int64_t batch_size,
                       double cost_per_sample = 1.0);

/// Virtual-clock batch time. The base time is scaled by (1 + eps) with
/// eps ~ Normal(0, noise_std^2) resampled until eps > -0.9, so the result is
/// always positive. No random draw happens when noise_std is 0.
double sample_batch_time(const WorkerProfile& profile, std::int64_t batch_size, Rng& rng,
                         double cost_per_sample = 1.0);

/// Sync-SGD iteration time: the slowest worker's batch time.
double iteration_time(std::span<const double> times);

double advance_virtual_clock(double clock, double delta);

/// Blocks the calling thread for the profile's injected delay (seconds).
void inject_delay(const WorkerProfile& profile);

struct BatchTimeSample {
  int worker_id = 0;
  std::int64_t iteration = 0;
  double compute_time = 0.0;
  double wait_time = 0.0;  // iteration_time - compute_time
};

/// Splits each worker's share of one iteration into compute and barrier wait.
std::vector<BatchTimeSample> split_iteration(std::int64_t iteration,
                                             std::span<const double> compute_times);

/// Monotone simulated time owned by the coordinator.
class VirtualClock {
 public:
  double now() const { return now_; }
  double advance(double delta) { return now_ = advance_virtual_clock(now_, delta); }

 private:
  double now_ = 0.0;
};

}  // namespace hetsgd
