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
#include <string_view>
#include <vector>

#include "hetsgd/errors.hpp"

namespace hetsgd {

/// Aggregation / partitioning strategy of a run.
///   kSync: even partitions for the whole run, uniform gradient mean.
///   kDp:   partitions re-planned every epoch from estimated compute power.
///   kEdp:  as kDp, with gradients weighted by normalized compute power.
enum class Mode { kSync, kDp, kEdp };

enum class CpEstimatorKind { kLastEpoch, kEma };

struct CpEstimator {
  CpEstimatorKind kind = CpEstimatorKind::kLastEpoch;
  double decay = 0.5;  // used by kEma only

  bool operator==(const CpEstimator&) const = default;
};

enum class TimingBackend { kVirtual, kRealtime };
enum class ModelKind { kQuadratic, kLogistic, kMlp };

/// How per-worker local batches are derived from the global batch size.
///   kProportional: b_m apportioned from B by partition share, K = round(N / B).
///   kFixed:        b_m = B / M for every worker, K = min_m floor(|D_m| / b).
enum class BatchSemantics { kProportional, kFixed };

/// Gradient weights under SYNC and DP. EDP always uses compute power.
enum class GradientWeighting { kUniform, kSample };

/// Serial runs every worker in the calling thread; parallel fans workers
/// (and per-coordinate aggregation) out over OpenMP. Results are identical.
enum class ExecutionPolicy { kSerial, kParallel };

struct WorkerProfile {
  int worker_id = 0;
  double speed_factor = 1.0;    // samples per time-unit
  double injected_delay = 0.0;  // time-units added to every batch
  double noise_std = 0.0;       // relative std-dev of multiplicative jitter

  bool operator==(const WorkerProfile&) const = default;
};

struct OptimizerParams {
  double eta_max = 0.1;
  double eta_min = 0.0;
  double momentum = 0.9;
  double weight_decay = 5e-4;

  bool operator==(const OptimizerParams&) const = default;
};

struct ExperimentConfig {
  int num_workers = 2;
  std::int64_t dataset_size = 1024;
  std::int64_t global_batch_size = 256;
  int epochs = 10;
  Mode mode = Mode::kSync;
  CpEstimator cp_estimator;
  TimingBackend timing_backend = TimingBackend::kVirtual;
  OptimizerParams optimizer;
  std::uint64_t seed = 0;

  // Per-worker heterogeneity. Empty means the default for every worker;
  // validation expands these to exactly num_workers entries.
  std::vector<double> speed_factors;
  std::vector<double> injected_delays;
  std::vector<double> noise_std;

  ModelKind model = ModelKind::kQuadratic;
  int feature_dim = 8;
  int hidden_width = 16;
  double cost_per_sample = 1.0;

  BatchSemantics batch_semantics = BatchSemantics::kProportional;
  GradientWeighting gradient_weighting = GradientWeighting::kUniform;
  ExecutionPolicy execution = ExecutionPolicy::kParallel;
  int histogram_bins = 25;

  bool operator==(const ExperimentConfig&) const = default;
};

/// An ExperimentConfig that passed validate_config. Only obtainable through
/// validation, so holders may rely on every constraint.
class ValidatedConfig {
 public:
  const ExperimentConfig& get() const { return config_; }
  const ExperimentConfig* operator->() const { return &config_; }

  /// Worker profiles built from the expanded per-worker vectors.
  std::vector<WorkerProfile> profiles() const;

  bool operator==(const ValidatedConfig&) const = default;

 private:
  friend ValidatedConfig validate_config(const ExperimentConfig& config);
  explicit ValidatedConfig(ExperimentConfig config) : config_(std::move(config)) {}

  ExperimentConfig config_;
};

/// Checks every constraint and returns the normalized config. Throws
/// InvalidConfig listing all violations; values are never clamped.
ValidatedConfig validate_config(const ExperimentConfig& config);

inline ValidatedConfig validate_config(const ValidatedConfig& config) {
  return validate_config(config.get());
}

struct IndexRange {
  std::int64_t begin = 0;
  std::int64_t end = 0;

  std::int64_t size() const { return end - begin; }
  bool operator==(const IndexRange&) const = default;
};

/// Per-worker share of the dataset for one epoch. Ranges index positions of
/// the epoch's permuted dataset order and tile [0, dataset_size).
struct PartitionPlan {
  int epoch_index = 0;
  std::vector<std::int64_t> sizes;
  std::vector<IndexRange> ranges;

  /// Lays sizes out as consecutive ranges starting at 0.
  static PartitionPlan from_sizes(int epoch_index, std::vector<std::int64_t> sizes);

  std::int64_t total() const;
  int num_workers() const { return static_cast<int>(sizes.size()); }
  bool operator==(const PartitionPlan&) const = default;
};

std::string_view to_string(Mode mode);
std::string_view to_string(CpEstimatorKind kind);
std::string_view to_string(TimingBackend backend);
std::string_view to_string(ModelKind kind);
std::string_view to_string(BatchSemantics semantics);
std::string_view to_string(GradientWeighting weighting);
std::string_view to_string(ExecutionPolicy policy);

// Case-insensitive; throw InvalidConfig on unknown names.
Mode parse_mode(std::string_view text);
TimingBackend parse_backend(std::string_view text);
ModelKind parse_model_kind(std::string_view text);

}  // namespace hetsgd
