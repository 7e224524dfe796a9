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

#include "hetsgd/partitioner.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include <fmt/format.h>

namespace hetsgd {

double EpochTiming::processing_time(int worker) const {
  return mean_batch_time[worker] * static_cast<double>(batch_counts[worker]);
}

double estimate_cp(std::int64_t partition_size, double epoch_time) {
  if (!(epoch_time > 0.0)) throw NonPositiveTime("estimate_cp: epoch time must be > 0");
  return static_cast<double>(partition_size) / epoch_time;
}

double predict_time(std::int64_t partition_size, double cp) {
  if (!(cp > 0.0)) throw NonPositiveCp("predict_time: compute power must be > 0");
  return static_cast<double>(partition_size) / cp;
}

std::vector<double> smooth_cp(std::span<const std::vector<double>> history,
                              const CpEstimator& estimator) {
  if (history.empty()) throw EmptyHistory("smooth_cp: empty history");
  if (estimator.kind == CpEstimatorKind::kLastEpoch) return history.back();

  const double d = estimator.decay;
  std::vector<double> smoothed = history.front();
  for (std::size_t t = 1; t < history.size(); ++t) {
    if (history[t].size() != smoothed.size())
      throw DimensionMismatch("smooth_cp: worker count changed within history");
    for (std::size_t m = 0; m < smoothed.size(); ++m)
      smoothed[m] = d * history[t][m] + (1.0 - d) * smoothed[m];
  }
  return smoothed;
}

std::vector<double> normalize_cp(std::span<const double> raw) {
  if (raw.empty()) throw InvalidWeights("normalize_cp: no workers");
  double total = 0.0;
  for (double v : raw) {
    if (!(v > 0.0) || !std::isfinite(v)) throw InvalidWeights("normalize_cp: entries must be > 0");
    total += v;
  }
  std::vector<double> out(raw.begin(), raw.end());
  for (auto& v : out) v /= total;
  return out;
}

std::vector<std::int64_t> plan_partitions(std::span<const double> normalized_cp,
                                          std::int64_t dataset_size) {
  const auto workers = static_cast<std::int64_t>(normalized_cp.size());
  if (workers == 0) throw InvalidWeights("plan_partitions: no workers");
  if (dataset_size < workers)
    throw InvalidWeights(fmt::format("plan_partitions: dataset_size {} < {} workers", dataset_size,
                                     workers));
  double total = 0.0;
  for (double w : normalized_cp) {
    if (!(w > 0.0) || !std::isfinite(w))
      throw InvalidWeights("plan_partitions: weights must be > 0");
    total += w;
  }
  if (std::abs(total - 1.0) > 1e-9)
    throw InvalidWeights(fmt::format("plan_partitions: weights sum to {}, not 1", total));

  std::vector<std::int64_t> sizes(workers);
  std::vector<double> remainders(workers);
  std::int64_t assigned = 0;
  for (std::int64_t m = 0; m < workers; ++m) {
    const double quota = normalized_cp[m] * static_cast<double>(dataset_size);
    const double floor = std::floor(quota);
    sizes[m] = static_cast<std::int64_t>(floor);
    remainders[m] = quota - floor;
    assigned += sizes[m];
  }

  // Remainders that are equal in exact arithmetic can differ by a few ulps of
  // the quota. Sorting on a coarse integer key keeps those tied, so the lower
  // index still wins.
  const double resolution = 64.0 * std::numeric_limits<double>::epsilon() * static_cast<double>(dataset_size);
  std::vector<std::int64_t> keys(workers);
  for (std::int64_t m = 0; m < workers; ++m) keys[m] = std::llround(remainders[m] / resolution);
  std::vector<std::int64_t> order(workers);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) { return keys[a] > keys[b]; });
  // Rounding in the quotas can leave the floors a sample or two away from
  // dataset_size in either direction; walk the remainder order to settle it.
  for (std::int64_t i = 0; assigned < dataset_size; i = (i + 1) % workers, ++assigned)
    ++sizes[order[i]];
  for (std::int64_t i = workers - 1; assigned > dataset_size; i = (i + workers - 1) % workers)
    if (sizes[order[i]] > 0) {
      --sizes[order[i]];
      --assigned;
    }

  for (std::int64_t m = 0; m < workers; ++m) {
    while (sizes[m] < 1) {
      const auto donor = std::max_element(sizes.begin(), sizes.end()) - sizes.begin();
      --sizes[donor];
      ++sizes[m];
    }
  }
  return sizes;
}

PartitionPlan even_plan(int epoch, int num_workers, std::int64_t dataset_size) {
  const std::vector<double> uniform(num_workers, 1.0 / num_workers);
  return PartitionPlan::from_sizes(epoch, plan_partitions(uniform, dataset_size));
}

DynamicPartitioner::DynamicPartitioner(int num_workers, std::int64_t dataset_size,
                                       CpEstimator estimator)
    : num_workers_(num_workers), dataset_size_(dataset_size), estimator_(estimator) {
  current_.raw.assign(num_workers_, 1.0 / num_workers_);
  current_.normalized = current_.raw;
}

PartitionPlan DynamicPartitioner::repartition(int epoch, const EpochTiming* timings,
                                              const PartitionPlan& prev_plan) {
  if (epoch == 0) {
    history_.clear();
    current_.raw.assign(num_workers_, 1.0 / num_workers_);
    current_.normalized = current_.raw;
    current_.source_epoch = 0;
    return even_plan(0, num_workers_, dataset_size_);
  }
  if (timings == nullptr)
    throw MissingTimings(fmt::format("repartition: epoch {} needs the previous epoch's timings",
                                     epoch));
  if (timings->num_workers() != num_workers_ || prev_plan.num_workers() != num_workers_)
    throw DimensionMismatch("repartition: worker count mismatch");

  std::vector<double> raw(num_workers_);
  for (int m = 0; m < num_workers_; ++m)
    raw[m] = estimate_cp(timings->samples_processed[m], timings->processing_time(m));
  history_.push_back(raw);

  current_.raw = smooth_cp(history_, estimator_);
  current_.normalized = normalize_cp(current_.raw);
  current_.source_epoch = timings->epoch_index;
  return PartitionPlan::from_sizes(epoch, plan_partitions(current_.normalized, dataset_size_));
}

PartitionPlan dynamic_partition(int epoch, const std::optional<EpochTiming>& timings,
                                const PartitionPlan& prev_plan, std::int64_t dataset_size) {
  DynamicPartitioner partitioner(prev_plan.num_workers(), dataset_size, CpEstimator{});
  if (epoch == 0) return partitioner.repartition(0, nullptr, prev_plan);
  return partitioner.repartition(epoch, timings ? &*timings : nullptr, prev_plan);
}

}  // namespace hetsgd
