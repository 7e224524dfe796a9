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

// Barrier-synchronized data-parallel SGD over M simulated workers.
//
// Each iteration every worker draws its local batch from its partition,
// computes a gradient on its own replica and reports a batch time. The
// coordinator then takes the max time as the iteration time, reduces the
// gradients in worker order, applies one optimizer step and copies the new
// parameters back into every replica. At each epoch boundary the
// coordinator re-plans partitions (DP/EDP) from the epoch's timings.
//
// Workers share only the read-only dataset. Under ExecutionPolicy::kParallel
// the worker phase runs as an OpenMP loop; kSerial runs the same per-worker
// code in order and gives bitwise identical VIRTUAL-mode results.

#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "hetsgd/aggregator.hpp"
#include "hetsgd/compute_model.hpp"
#include "hetsgd/core.hpp"
#include "hetsgd/optimizer.hpp"
#include "hetsgd/partitioner.hpp"
#include "hetsgd/telemetry.hpp"
#include "hetsgd/trainkit.hpp"

namespace hetsgd {

struct WorkerAssignment {
  int worker_id = 0;
  IndexRange range;
  std::int64_t local_batch_size = 1;
  std::int64_t iterations_per_epoch = 1;  // identical for all workers
};

/// Derives local batches and the shared iteration count from a plan.
std::vector<WorkerAssignment> assign_batches(const PartitionPlan& plan,
                                             std::int64_t global_batch_size,
                                             BatchSemantics semantics);

struct EpochSummary {
  int epoch = 0;
  PartitionPlan plan;
  CpEstimate cp;                 // estimate the plan was built from
  std::vector<double> weights;   // gradient weights used during the epoch
  std::vector<std::int64_t> local_batch_sizes;
  EpochTiming timing;
  double learning_rate = 0.0;
  double wall_time = 0.0;        // sum of iteration times
  double clock_end = 0.0;
  double full_loss = 0.0;
  double holdout_accuracy = 0.0;  // NaN for QUADRATIC
};

struct RunArtifacts {
  ExperimentConfig config;
  std::vector<EpochSummary> epochs;
  Telemetry telemetry;
  std::vector<double> final_params;
  double total_time = 0.0;
  double final_loss = 0.0;
};

struct EpochResult {
  EpochTiming timing;
  std::vector<IterationRecord> records;
  double wall_time = 0.0;
};

class Engine {
 public:
  /// Generates the dataset and initial model from the config.
  explicit Engine(const ValidatedConfig& config);
  Engine(const ValidatedConfig& config, Dataset dataset, Model model);

  /// One barrier-synchronized step. weights are indexed by worker id.
  IterationRecord run_iteration(std::span<const WorkerAssignment> assignments,
                                std::span<const double> weights, int epoch,
                                std::int64_t iteration, double learning_rate);

  /// Reshuffles the dataset order, then runs K iterations on plan.
  EpochResult run_epoch(int epoch, const PartitionPlan& plan, std::span<const double> weights,
                        double learning_rate);

  /// The full outer loop: partition, train, time, repartition.
  RunArtifacts run_training();

  const Dataset& dataset() const { return dataset_; }
  const Model& model() const { return model_; }
  std::span<const double> params() const { return model_.params; }
  std::span<const double> replica(int worker) const { return workers_[worker].params; }
  const std::vector<std::int64_t>& epoch_order() const { return order_; }
  double clock() const { return clock_.now(); }

 private:
  struct WorkerContext {
    WorkerProfile profile;
    Rng rng;
    std::vector<double> params;
  };

  struct WorkerOutput {
    GradientMessage message;
    double loss = 0.0;
    double compute_time = 0.0;
  };

  WorkerOutput run_worker(WorkerContext& worker, const WorkerAssignment& assignment,
                          std::int64_t iteration) const;
  void reshuffle();

  ValidatedConfig config_;
  Dataset dataset_;
  Model model_;  // coordinator's copy of the parameters
  OptimizerState optimizer_;
  std::vector<WorkerContext> workers_;
  std::vector<std::int64_t> order_;  // epoch's permuted dataset order
  Rng order_rng_;
  VirtualClock clock_;
};

/// Convenience: Engine(config).run_training().
RunArtifacts run_training(const ValidatedConfig& config);

}  // namespace hetsgd
