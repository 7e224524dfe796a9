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

#include "hetsgd/core.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <numeric>
#include <string>

#include <fmt/format.h>

namespace hetsgd {

namespace {

std::string join(const std::vector<std::string>& parts) {
  std::string out;
  for (const auto& part : parts) {
    if (!out.empty()) out += "; ";
    out += part;
  }
  return out;
}

std::string lower(std::string_view text) {
  std::string out(text);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

// Expands an optional per-worker vector to exactly M entries.
void expand_per_worker(std::vector<double>& values, int num_workers, double fallback,
                       std::string_view name, std::vector<std::string>& errors) {
  if (num_workers < 1) return;
  if (values.empty()) {
    values.assign(num_workers, fallback);
  } else if (values.size() == 1 && num_workers > 1) {
    values.assign(num_workers, values.front());
  } else if (static_cast<int>(values.size()) != num_workers) {
    errors.push_back(fmt::format("{} has {} entries, expected num_workers = {}", name,
                                 values.size(), num_workers));
  }
}

}  // namespace

InvalidConfig::InvalidConfig(std::vector<std::string> violations)
    : Error("invalid config: " + join(violations)), violations_(std::move(violations)) {}

ValidatedConfig validate_config(const ExperimentConfig& input) {
  ExperimentConfig config = input;
  std::vector<std::string> errors;

  if (config.num_workers < 1) errors.push_back("num_workers must be >= 1");
  if (config.dataset_size < config.num_workers) errors.push_back("dataset_size < num_workers");
  if (config.global_batch_size < config.num_workers)
    errors.push_back("global_batch_size < num_workers");
  if (config.global_batch_size > config.dataset_size)
    errors.push_back("global_batch_size > dataset_size");
  if (config.epochs < 1) errors.push_back("epochs must be >= 1");

  if (config.cp_estimator.kind == CpEstimatorKind::kEma &&
      !(config.cp_estimator.decay > 0.0 && config.cp_estimator.decay <= 1.0))
    errors.push_back("ema_decay outside (0,1]");

  const auto& opt = config.optimizer;
  if (!(opt.eta_max > 0.0) || !std::isfinite(opt.eta_max)) errors.push_back("eta_max must be > 0");
  if (!(opt.eta_min >= 0.0)) errors.push_back("eta_min must be >= 0");
  if (opt.eta_min >= opt.eta_max) errors.push_back("eta_min must be < eta_max");
  if (!(opt.momentum >= 0.0 && opt.momentum < 1.0)) errors.push_back("momentum outside [0,1)");
  if (!(opt.weight_decay >= 0.0) || !std::isfinite(opt.weight_decay))
    errors.push_back("weight_decay must be >= 0");

  expand_per_worker(config.speed_factors, config.num_workers, 1.0, "speed_factors", errors);
  expand_per_worker(config.injected_delays, config.num_workers, 0.0, "injected_delays", errors);
  expand_per_worker(config.noise_std, config.num_workers, 0.0, "noise_std", errors);
  for (double s : config.speed_factors)
    if (!(s > 0.0) || !std::isfinite(s)) {
      errors.push_back("speed_factors entries must be > 0");
      break;
    }
  for (double d : config.injected_delays)
    if (!(d >= 0.0) || !std::isfinite(d)) {
      errors.push_back("injected_delays entries must be >= 0");
      break;
    }
  for (double n : config.noise_std)
    if (!(n >= 0.0) || !std::isfinite(n)) {
      errors.push_back("noise_std entries must be >= 0");
      break;
    }

  if (config.feature_dim < 1) errors.push_back("feature_dim must be >= 1");
  if (config.model == ModelKind::kMlp && config.hidden_width < 1)
    errors.push_back("hidden_width must be >= 1");
  if (!(config.cost_per_sample > 0.0) || !std::isfinite(config.cost_per_sample))
    errors.push_back("cost_per_sample must be > 0");
  if (config.histogram_bins < 1) errors.push_back("histogram_bins must be >= 1");
  if (config.mode == Mode::kEdp && config.gradient_weighting == GradientWeighting::kSample)
    errors.push_back("gradient_weighting = sample conflicts with mode = edp");

  if (!errors.empty()) throw InvalidConfig(std::move(errors));
  return ValidatedConfig(std::move(config));
}

std::vector<WorkerProfile> ValidatedConfig::profiles() const {
  std::vector<WorkerProfile> out;
  out.reserve(config_.num_workers);
  for (int m = 0; m < config_.num_workers; ++m)
    out.push_back({m, config_.speed_factors[m], config_.injected_delays[m], config_.noise_std[m]});
  return out;
}

PartitionPlan PartitionPlan::from_sizes(int epoch_index, std::vector<std::int64_t> sizes) {
  PartitionPlan plan;
  plan.epoch_index = epoch_index;
  plan.ranges.reserve(sizes.size());
  std::int64_t begin = 0;
  for (auto size : sizes) {
    plan.ranges.push_back({begin, begin + size});
    begin += size;
  }
  plan.sizes = std::move(sizes);
  return plan;
}

std::int64_t PartitionPlan::total() const {
  return std::accumulate(sizes.begin(), sizes.end(), std::int64_t{0});
}

std::string_view to_string(Mode mode) {
  switch (mode) {
    case Mode::kSync: return "sync";
    case Mode::kDp: return "dp";
    case Mode::kEdp: return "edp";
  }
  return "?";
}

std::string_view to_string(CpEstimatorKind kind) {
  return kind == CpEstimatorKind::kLastEpoch ? "last_epoch" : "ema";
}

std::string_view to_string(TimingBackend backend) {
  return backend == TimingBackend::kVirtual ? "virtual" : "realtime";
}

std::string_view to_string(ModelKind kind) {
  switch (kind) {
    case ModelKind::kQuadratic: return "quadratic";
    case ModelKind::kLogistic: return "logistic";
    case ModelKind::kMlp: return "mlp";
  }
  return "?";
}

std::string_view to_string(BatchSemantics semantics) {
  return semantics == BatchSemantics::kProportional ? "proportional" : "fixed";
}

std::string_view to_string(GradientWeighting weighting) {
  return weighting == GradientWeighting::kUniform ? "uniform" : "sample";
}

std::string_view to_string(ExecutionPolicy policy) {
  return policy == ExecutionPolicy::kSerial ? "serial" : "parallel";
}

Mode parse_mode(std::string_view text) {
  const auto name = lower(text);
  if (name == "sync") return Mode::kSync;
  if (name == "dp") return Mode::kDp;
  if (name == "edp") return Mode::kEdp;
  throw InvalidConfig({fmt::format("unknown mode '{}' (expected sync, dp or edp)", text)});
}

TimingBackend parse_backend(std::string_view text) {
  const auto name = lower(text);
  if (name == "virtual") return TimingBackend::kVirtual;
  if (name == "realtime") return TimingBackend::kRealtime;
  throw InvalidConfig({fmt::format("unknown backend '{}' (expected virtual or realtime)", text)});
}

ModelKind parse_model_kind(std::string_view text) {
  const auto name = lower(text);
  if (name == "quadratic") return ModelKind::kQuadratic;
  if (name == "logistic") return ModelKind::kLogistic;
  if (name == "mlp") return ModelKind::kMlp;
  throw InvalidConfig({fmt::format("unknown model '{}'", text)});
}

}  // namespace hetsgd
