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

// Compute-power estimation and dynamic repartitioning.
//
// A worker that processed n samples in t time-units has compute power n / t.
// Normalizing those estimates gives each worker's share of the next epoch's
// dataset, which equalizes predicted processing times n' / cp across workers.

#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "hetsgd/core.hpp"

namespace hetsgd {

struct CpEstimate {
  std::vector<double> raw;         // samples per time-unit
  std::vector<double> normalized;  // raw / sum(raw)
  int source_epoch = 0;
};

/// What one epoch looked like from each worker's side.
struct EpochTiming {
  int epoch_index = 0;
  std::vector<double> mean_batch_time;
  std::vector<std::int64_t> batch_counts;
  std::vector<std::int64_t> samples_processed;

  /// Total compute time of worker m over the epoch (excludes barrier wait).
  double processing_time(int worker) const;
  int num_workers() const { return static_cast<int>(mean_batch_time.size()); }
};

double estimate_cp(std::int64_t partition_size, double epoch_time);
double predict_time(std::int64_t partition_size, double cp);

/// LAST_EPOCH returns the newest entry; EMA(d) folds s = d*cp + (1-d)*s
/// from the oldest entry forward.
std::vector<double> smooth_cp(std::span<const std::vector<double>> history,
                              const CpEstimator& estimator);

/// Divides by the sum. Throws InvalidWeights on non-positive entries.
std::vector<double> normalize_cp(std::span<const double> raw);

/// Largest-remainder apportionment of dataset_size by normalized weights.
/// Floors every quota, hands the leftover samples one each to the largest
/// fractional remainders (ties to the lower worker id), then moves single
/// samples from the largest partition to any empty one.
std::vector<std::int64_t> plan_partitions(std::span<const double> normalized_cp,
                                          std::int64_t dataset_size);

/// Stateful form of the per-epoch repartitioning rule; keeps the raw CP
/// history that smoothing needs.
class DynamicPartitioner {
 public:
  DynamicPartitioner(int num_workers, std::int64_t dataset_size, CpEstimator estimator);

  /// Epoch 0 resets history and returns the even split; later epochs need
  /// the previous epoch's timings and re-plan from smoothed compute power.
  PartitionPlan repartition(int epoch, const EpochTiming* timings, const PartitionPlan& prev_plan);

  /// Estimate behind the most recent plan (uniform after epoch 0).
  const CpEstimate& current() const { return current_; }
  const std::vector<std::vector<double>>& history() const { return history_; }

 private:
  int num_workers_;
  std::int64_t dataset_size_;
  CpEstimator estimator_;
  std::vector<std::vector<double>> history_;
  CpEstimate current_;
};

/// One-shot repartition with the LAST_EPOCH estimator.
PartitionPlan dynamic_partition(int epoch, const std::optional<EpochTiming>& timings,
                                const PartitionPlan& prev_plan, std::int64_t dataset_size);

PartitionPlan even_plan(int epoch, int num_workers, std::int64_t dataset_size);

}  // namespace hetsgd
