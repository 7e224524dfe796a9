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

#include "hetsgd/telemetry.hpp"

#include <algorithm>
#include <cmath>
#include <tuple>

#include <fmt/format.h>

namespace hetsgd {

Telemetry::Telemetry(int num_workers) : num_workers_(num_workers) {
  breakdown_.compute_total.assign(num_workers, 0.0);
  breakdown_.wait_total.assign(num_workers, 0.0);
}

void Telemetry::record(const IterationRecord& record) {
  if (static_cast<int>(record.compute_times.size()) != num_workers_)
    throw DimensionMismatch(fmt::format("record: {} worker times, expected {}",
                                        record.compute_times.size(), num_workers_));
  if (!records_.empty()) {
    const auto& last = records_.back();
    if (std::tie(record.epoch, record.iteration) <= std::tie(last.epoch, last.iteration))
      throw OutOfOrderRecord(fmt::format("record: ({}, {}) does not follow ({}, {})", record.epoch,
                                         record.iteration, last.epoch, last.iteration));
  }
  for (int m = 0; m < num_workers_; ++m) {
    breakdown_.compute_total[m] += record.compute_times[m];
    breakdown_.wait_total[m] += record.iteration_time - record.compute_times[m];
  }
  total_time_ += record.iteration_time;
  records_.push_back(record);
}

Histogram Telemetry::build_histogram(int worker_id, int bins) const {
  if (worker_id < 0 || worker_id >= num_workers_)
    throw IndexOutOfRange(fmt::format("build_histogram: no worker {}", worker_id));
  if (bins < 1) throw IndexOutOfRange("build_histogram: bins must be >= 1");
  if (records_.empty()) throw NoData(fmt::format("build_histogram: no samples for worker {}", worker_id));

  double lo = records_.front().compute_times[worker_id];
  double hi = lo;
  for (const auto& r : records_) {
    lo = std::min(lo, r.compute_times[worker_id]);
    hi = std::max(hi, r.compute_times[worker_id]);
  }
  // Degenerate range: unit-width bins starting at the common value.
  const double width = hi > lo ? (hi - lo) / bins : std::max(std::abs(lo), 1.0) / bins;

  Histogram hist;
  hist.worker_id = worker_id;
  hist.counts.assign(bins, 0);
  hist.bin_edges.resize(bins + 1);
  for (int i = 0; i <= bins; ++i) hist.bin_edges[i] = lo + width * i;
  if (hi > lo) hist.bin_edges.back() = hi;

  // First interior edge >= x picks the bin, so an x on an edge stays low.
  const auto interior_begin = hist.bin_edges.begin() + 1;
  const auto interior_end = hist.bin_edges.end() - 1;
  for (const auto& r : records_) {
    const double x = r.compute_times[worker_id];
    const auto bin = std::lower_bound(interior_begin, interior_end, x) - interior_begin;
    ++hist.counts[bin];
  }
  return hist;
}

double spread_ratio(const std::vector<double>& values) {
  if (values.empty()) throw EmptyInput("spread_ratio: no values");
  const auto [lo, hi] = std::minmax_element(values.begin(), values.end());
  if (!(*lo > 0.0)) throw NonPositiveTime("spread_ratio: values must be > 0");
  return *hi / *lo;
}

}  // namespace hetsgd
