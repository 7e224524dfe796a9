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

#include "hetsgd/engine.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <exception>
#include <numeric>

#include <fmt/format.h>

namespace hetsgd {

namespace {

Rng order_rng_for(std::uint64_t seed) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    0x6f72u /* "or" */};
  return Rng(seq);
}

bool all_equal(std::span<const double> values) {
  return std::adjacent_find(values.begin(), values.end(), std::not_equal_to<>()) == values.end();
}

template <typename Body>
void for_each_worker(ExecutionPolicy policy, int workers, Body&& body) {
  if (policy == ExecutionPolicy::kParallel) {
#pragma omp parallel for schedule(static)
    for (int m = 0; m < workers; ++m) body(m);
  } else {
    for (int m = 0; m < workers; ++m) body(m);
  }
}

}  // namespace

std::vector<WorkerAssignment> assign_batches(const PartitionPlan& plan,
                                             std::int64_t global_batch_size,
                                             BatchSemantics semantics) {
  const int workers = plan.num_workers();
  const std::int64_t total = plan.total();
  if (workers == 0 || global_batch_size < workers)
    throw InvalidConfig({"global_batch_size must be >= num_workers"});

  std::vector<std::int64_t> local(workers);
  std::int64_t iterations = 1;
  if (semantics == BatchSemantics::kProportional) {
    std::vector<double> share(workers);
    for (int m = 0; m < workers; ++m)
      share[m] = static_cast<double>(plan.sizes[m]) / static_cast<double>(total);
    local = plan_partitions(share, global_batch_size);
    iterations = std::max<std::int64_t>(
        1, std::llround(static_cast<double>(total) / static_cast<double>(global_batch_size)));
  } else {
    const std::int64_t b = std::max<std::int64_t>(1, global_batch_size / workers);
    local.assign(workers, b);
    iterations = *std::min_element(plan.sizes.begin(), plan.sizes.end()) / b;
    iterations = std::max<std::int64_t>(1, iterations);
  }

  std::vector<WorkerAssignment> out(workers);
  for (int m = 0; m < workers; ++m) out[m] = {m, plan.ranges[m], local[m], iterations};
  return out;
}

Engine::Engine(const ValidatedConfig& config)
    : Engine(config,
             gen_synthetic(config->model, config->dataset_size, config->feature_dim, config->seed,
                           config->hidden_width),
             make_model(config->model, config->feature_dim, config->hidden_width, config->seed,
                        config->cost_per_sample)) {}

Engine::Engine(const ValidatedConfig& config, Dataset dataset, Model model)
    : config_(config),
      dataset_(std::move(dataset)),
      model_(std::move(model)),
      optimizer_(model_.dim()),
      order_rng_(order_rng_for(config->seed)) {
  if (dataset_.num_samples != config_->dataset_size)
    throw DimensionMismatch(fmt::format("Engine: dataset has {} samples, config says {}",
                                        dataset_.num_samples, config_->dataset_size));
  for (const auto& profile : config_.profiles())
    workers_.push_back({profile, worker_rng(config_->seed, profile.worker_id), model_.params});
  order_.resize(dataset_.num_samples);
  std::iota(order_.begin(), order_.end(), std::int64_t{0});
}

void Engine::reshuffle() {
  std::iota(order_.begin(), order_.end(), std::int64_t{0});
  std::shuffle(order_.begin(), order_.end(), order_rng_);
}

Engine::WorkerOutput Engine::run_worker(WorkerContext& worker, const WorkerAssignment& assignment,
                                        std::int64_t iteration) const {
  const auto size = assignment.range.size();
  const auto b = assignment.local_batch_size;
  std::vector<std::int64_t> batch(b);
  for (std::int64_t j = 0; j < b; ++j)
    batch[j] = order_[assignment.range.begin + (iteration * b + j) % size];

  WorkerOutput out;
  const auto started = std::chrono::steady_clock::now();
  auto result = loss_and_grad(model_, worker.params, batch, dataset_);
  if (config_->timing_backend == TimingBackend::kRealtime) {
    inject_delay(worker.profile);
    out.compute_time =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
  } else {
    out.compute_time = sample_batch_time(worker.profile, b, worker.rng, model_.cost_per_sample);
  }
  out.loss = result.loss;
  out.message = {worker.profile.worker_id, std::move(result.grad), 0.0};
  return out;
}

IterationRecord Engine::run_iteration(std::span<const WorkerAssignment> assignments,
                                      std::span<const double> weights, int epoch,
                                      std::int64_t iteration, double learning_rate) {
  const int workers = static_cast<int>(workers_.size());
  if (static_cast<int>(assignments.size()) != workers || static_cast<int>(weights.size()) != workers)
    throw DimensionMismatch("run_iteration: need one assignment and one weight per worker");

  // Worker phase. Each worker touches only its own context and output slot.
  std::vector<WorkerOutput> outputs(workers);
  std::vector<std::exception_ptr> failures(workers);
  for_each_worker(config_->execution, workers, [&](int m) {
    try {
      outputs[m] = run_worker(workers_[m], assignments[m], iteration);
    } catch (...) {
      failures[m] = std::current_exception();
    }
  });
  for (int m = 0; m < workers; ++m) {
    if (!failures[m]) continue;
    try {
      std::rethrow_exception(failures[m]);
    } catch (const std::exception& error) {
      throw WorkerFailure(fmt::format("worker {} failed at epoch {} iteration {}: {}", m, epoch,
                                      iteration, error.what()));
    }
  }

  // Barrier passed; coordinator phase.
  IterationRecord record;
  record.epoch = epoch;
  record.iteration = iteration;
  record.compute_times.resize(workers);
  std::vector<GradientMessage> messages(workers);
  for (int m = 0; m < workers; ++m) {
    record.compute_times[m] = outputs[m].compute_time;
    outputs[m].message.weight = weights[m];
    messages[m] = std::move(outputs[m].message);
    record.loss += weights[m] * outputs[m].loss;
  }
  record.iteration_time = iteration_time(record.compute_times);
  record.clock = clock_.advance(record.iteration_time);

  const auto gradient = all_equal(weights)
                            ? allreduce_mean(messages, config_->execution)
                            : weighted_aggregate(messages, weights, config_->execution);
  const auto& opt = config_->optimizer;
  sgd_step(model_.params, gradient, optimizer_, learning_rate, opt.momentum, opt.weight_decay);

  for_each_worker(config_->execution, workers,
                  [&](int m) { workers_[m].params = model_.params; });
  return record;
}

EpochResult Engine::run_epoch(int epoch, const PartitionPlan& plan, std::span<const double> weights,
                              double learning_rate) {
  const int workers = static_cast<int>(workers_.size());
  if (plan.num_workers() != workers || plan.total() != dataset_.num_samples)
    throw DimensionMismatch("run_epoch: plan does not match the cluster and dataset");
  reshuffle();
  const auto assignments = assign_batches(plan, config_->global_batch_size, config_->batch_semantics);
  const auto iterations = assignments.front().iterations_per_epoch;

  EpochResult result;
  result.records.reserve(iterations);
  std::vector<double> compute_sum(workers, 0.0);
  for (std::int64_t k = 0; k < iterations; ++k) {
    auto record = run_iteration(assignments, weights, epoch, k, learning_rate);
    for (int m = 0; m < workers; ++m) compute_sum[m] += record.compute_times[m];
    result.wall_time += record.iteration_time;
    result.records.push_back(std::move(record));
  }

  auto& timing = result.timing;
  timing.epoch_index = epoch;
  for (int m = 0; m < workers; ++m) {
    timing.mean_batch_time.push_back(compute_sum[m] / static_cast<double>(iterations));
    timing.batch_counts.push_back(iterations);
    timing.samples_processed.push_back(iterations * assignments[m].local_batch_size);
  }
  return result;
}

RunArtifacts Engine::run_training() {
  const auto& config = config_.get();
  const int workers = config.num_workers;
  const auto dataset_size = config.dataset_size;
  const LrSchedule schedule{config.optimizer.eta_max, config.optimizer.eta_min, config.epochs};

  RunArtifacts artifacts;
  artifacts.config = config;
  artifacts.telemetry = Telemetry(workers);

  DynamicPartitioner partitioner(workers, dataset_size, config.cp_estimator);
  PartitionPlan plan;
  EpochTiming previous;
  for (int epoch = 0; epoch < config.epochs; ++epoch) {
    if (epoch == 0 || config.mode == Mode::kSync) {
      plan = partitioner.repartition(0, nullptr, plan);
      plan.epoch_index = epoch;
    } else {
      plan = partitioner.repartition(epoch, &previous, plan);
    }

    std::vector<double> weights(workers, 1.0 / workers);
    if (config.mode == Mode::kEdp) {
      weights = partitioner.current().normalized;
    } else if (config.gradient_weighting == GradientWeighting::kSample) {
      for (int m = 0; m < workers; ++m)
        weights[m] = static_cast<double>(plan.sizes[m]) / static_cast<double>(dataset_size);
    }

    const double lr = cosine_lr(epoch, schedule);
    auto result = run_epoch(epoch, plan, weights, lr);
    for (const auto& record : result.records) artifacts.telemetry.record(record);

    EpochSummary summary;
    summary.epoch = epoch;
    summary.plan = plan;
    summary.cp = partitioner.current();
    summary.weights = weights;
    for (const auto& a : assign_batches(plan, config.global_batch_size, config.batch_semantics))
      summary.local_batch_sizes.push_back(a.local_batch_size);
    summary.timing = result.timing;
    summary.learning_rate = lr;
    summary.wall_time = result.wall_time;
    summary.clock_end = clock_.now();
    summary.full_loss = full_loss(model_, dataset_);
    summary.holdout_accuracy = holdout_accuracy(model_, dataset_);
    artifacts.epochs.push_back(std::move(summary));

    previous = std::move(result.timing);
  }

  artifacts.final_params = model_.params;
  artifacts.total_time = artifacts.telemetry.total_time();
  artifacts.final_loss = artifacts.epochs.empty() ? full_loss(model_, dataset_)
                                                  : artifacts.epochs.back().full_loss;
  return artifacts;
}

RunArtifacts run_training(const ValidatedConfig& config) { return Engine(config).run_training(); }

}  // namespace hetsgd
