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

// Grid experiments: heterogeneity level x compute cost x mode x repeat.
//
// A sweep spec uses the config file syntax. Besides any ExperimentConfig
// key (overriding `base`), it accepts:
//
//   base = base.cfg                  # optional, relative to the spec file
//   modes = sync, dp, edp
//   repeats = 5                      # seeds base.seed + 0 .. repeats-1
//   level.<name>.speed_factors = 1, 2
//   level.<name>.injected_delays = 0, 0.1
//   cost.<name> = 1.0                # cost_per_sample
//
// Without level.* keys the sweep uses {low, high}: the second half of the
// workers runs 25% / 50% slower per batch. Without cost.* keys it uses
// {light = 0.25, heavy = 1.0}.

#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "hetsgd/core.hpp"

namespace hetsgd {

struct HeterogeneityLevel {
  std::string name;
  std::vector<double> speed_factors;    // empty keeps the base value
  std::vector<double> injected_delays;  // empty keeps the base value
};

struct CostLevel {
  std::string name;
  double cost_per_sample = 1.0;
};

struct SweepSpec {
  ExperimentConfig base;
  std::vector<Mode> modes;
  std::vector<HeterogeneityLevel> levels;
  std::vector<CostLevel> costs;
  int repeats = 1;
};

SweepSpec parse_sweep_spec(std::string_view text,
                           const std::filesystem::path& base_dir = std::filesystem::path("."));
SweepSpec load_sweep_spec(const std::filesystem::path& path);

struct SweepCell {
  std::string level;
  std::string cost;
  Mode mode = Mode::kSync;
  int repeat = 0;
  std::filesystem::path dir;  // relative to the sweep output directory
  double total_time = 0.0;
  double final_loss = 0.0;
};

struct SweepRow {
  std::string level;
  std::string cost;
  Mode mode = Mode::kSync;
  int repeats = 0;
  double time_mean = 0.0;
  double time_std = 0.0;  // sample std-dev, 0 for a single repeat
  double loss_mean = 0.0;
  double loss_std = 0.0;
};

struct SweepResult {
  std::vector<SweepCell> cells;
  std::vector<SweepRow> rows;
};

/// Validated config of every cell, in output order. Throws InvalidConfig
/// naming the cell on the first invalid one.
std::vector<std::pair<SweepCell, ValidatedConfig>> expand_sweep(const SweepSpec& spec);

/// Runs every cell, writes <out>/<level>/<cost>/<mode>/rep<r>/ exports and
/// <out>/aggregate.csv.
SweepResult run_sweep(const SweepSpec& spec, const std::filesystem::path& out_dir);

std::string aggregate_csv(const SweepResult& result);
std::string format_table(const SweepResult& result);

double mean(const std::vector<double>& values);
double sample_std(const std::vector<double>& values);

}  // namespace hetsgd
