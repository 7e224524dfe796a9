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
#include <vector>

#include "hetsgd/errors.hpp"

namespace hetsgd {

struct IterationRecord {
  int epoch = 0;
  std::int64_t iteration = 0;  // within the epoch
  std::vector<double> compute_times;
  double iteration_time = 0.0;
  double loss = 0.0;
  double clock = 0.0;  // clock after the iteration's barrier
};

struct Histogram {
  int worker_id = 0;
  std::vector<double> bin_edges;  // bins + 1 strictly increasing edges
  std::vector<std::int64_t> counts;
};

struct TimeBreakdown {
  std::vector<double> compute_total;
  std::vector<double> wait_total;
};

/// Single-writer store of iteration records with running per-worker totals.
class Telemetry {
 public:
  Telemetry() = default;
  explicit Telemetry(int num_workers);

  /// Appends a record. (epoch, iteration) must strictly increase.
  void record(const IterationRecord& record);

  const std::vector<IterationRecord>& records() const { return records_; }
  std::size_t size() const { return records_.size(); }
  int num_workers() const { return num_workers_; }
  const TimeBreakdown& breakdown() const { return breakdown_; }

  /// Sum of iteration times recorded so far.
  double total_time() const { return total_time_; }

  /// Equal-width bins over [min, max] of one worker's compute times. A value
  /// on an interior edge goes to the lower bin; the maximum lands in the
  /// last bin. Identical samples all land in bin 0.
  Histogram build_histogram(int worker_id, int bins) const;

 private:
  int num_workers_ = 0;
  std::vector<IterationRecord> records_;
  TimeBreakdown breakdown_;
  double total_time_ = 0.0;
};

/// Ratio of the largest to the smallest entry (all entries must be > 0).
double spread_ratio(const std::vector<double>& values);

}  // namespace hetsgd
