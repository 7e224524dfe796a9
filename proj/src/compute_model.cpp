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

#include "hetsgd/compute_model.hpp"

#include <algorithm>
#include <chrono>
#include <thread>

namespace hetsgd {

double base_batch_time(const WorkerProfile& profile, std::int64_t batch_size,
                       double cost_per_sample) {
  return static_cast<double>(batch_size) * cost_per_sample / profile.speed_factor +
         profile.injected_delay;
}

double sample_batch_time(const WorkerProfile& profile, std::int64_t batch_size, Rng& rng,
                         double cost_per_sample) {
  const double base = base_batch_time(profile, batch_size, cost_per_sample);
  if (profile.noise_std == 0.0) return base;
  std::normal_distribution<double> jitter(0.0, profile.noise_std);
  double eps = jitter(rng);
  while (eps <= -0.9) eps = jitter(rng);
  return base * (1.0 + eps);
}

double iteration_time(std::span<const double> times) {
  if (times.empty()) throw EmptyInput("iteration_time: no worker times");
  return *std::max_element(times.begin(), times.end());
}

double advance_virtual_clock(double clock, double delta) {
  if (delta < 0.0) throw NegativeDelta("advance_virtual_clock: negative delta");
  return clock + delta;
}

void inject_delay(const WorkerProfile& profile) {
  if (profile.injected_delay > 0.0)
    std::this_thread::sleep_for(std::chrono::duration<double>(profile.injected_delay));
}

std::vector<BatchTimeSample> split_iteration(std::int64_t iteration,
                                             std::span<const double> compute_times) {
  const double slowest = iteration_time(compute_times);
  std::vector<BatchTimeSample> out;
  out.reserve(compute_times.size());
  for (std::size_t m = 0; m < compute_times.size(); ++m)
    out.push_back({static_cast<int>(m), iteration, compute_times[m], slowest - compute_times[m]});
  return out;
}

}  // namespace hetsgd
