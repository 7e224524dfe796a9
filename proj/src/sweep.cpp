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

#include "hetsgd/sweep.hpp"

#include <cmath>
#include <map>
#include <numeric>

#include <fmt/format.h>

#include "hetsgd/config_io.hpp"
#include "hetsgd/engine.hpp"
#include "hetsgd/export.hpp"

namespace hetsgd {

namespace {

HeterogeneityLevel& level_named(std::vector<HeterogeneityLevel>& levels, const std::string& name) {
  for (auto& level : levels)
    if (level.name == name) return level;
  levels.push_back({name, {}, {}});
  return levels.back();
}

// Second half of the workers gets 1/slowdown of the base speed.
HeterogeneityLevel default_level(std::string name, const ExperimentConfig& base, double slowdown) {
  HeterogeneityLevel level{std::move(name), {}, {}};
  const int workers = std::max(base.num_workers, 1);
  for (int m = 0; m < workers; ++m) {
    const double speed = base.speed_factors.size() == static_cast<std::size_t>(workers)
                             ? base.speed_factors[m]
                             : 1.0;
    level.speed_factors.push_back(workers > 1 && m >= workers / 2 ? speed / slowdown : speed);
  }
  return level;
}

}  // namespace

SweepSpec parse_sweep_spec(std::string_view text, const std::filesystem::path& base_dir) {
  const auto entries = parse_key_values(text);
  SweepSpec spec;
  spec.repeats = 5;
  for (const auto& entry : entries)
    if (entry.key == "base") spec.base = load_config_file(base_dir / entry.value);

  std::vector<std::string> errors;
  for (const auto& entry : entries) {
    const auto& key = entry.key;
    if (key == "base") continue;
    if (key == "modes") {
      std::string_view rest = entry.value;
      while (!rest.empty()) {
        const auto comma = rest.find(',');
        auto word = rest.substr(0, comma);
        while (!word.empty() && word.front() == ' ') word.remove_prefix(1);
        while (!word.empty() && word.back() == ' ') word.remove_suffix(1);
        spec.modes.push_back(parse_mode(word));
        rest = comma == std::string_view::npos ? std::string_view{} : rest.substr(comma + 1);
      }
    } else if (key == "repeats") {
      spec.repeats = static_cast<int>(parse_integer_value(entry));
    } else if (key.rfind("level.", 0) == 0) {
      const auto dot = key.rfind('.');
      const auto name = key.substr(6, dot - 6);
      const auto field = key.substr(dot + 1);
      if (name.empty() || dot <= 6 || (field != "speed_factors" && field != "injected_delays")) {
        errors.push_back(fmt::format("line {}: expected level.<name>.speed_factors or "
                                     "level.<name>.injected_delays", entry.line));
        continue;
      }
      auto& level = level_named(spec.levels, name);
      (field == "speed_factors" ? level.speed_factors : level.injected_delays) = parse_number_list(entry);
    } else if (key.rfind("cost.", 0) == 0) {
      const auto name = key.substr(5);
      const auto values = parse_number_list(entry);
      if (name.empty() || values.size() != 1) {
        errors.push_back(fmt::format("line {}: expected cost.<name> = <number>", entry.line));
        continue;
      }
      spec.costs.push_back({name, values.front()});
    } else if (!apply_config_key(spec.base, entry)) {
      errors.push_back(fmt::format("line {}: unknown key '{}'", entry.line, key));
    }
  }
  if (spec.repeats < 1) errors.push_back("repeats must be >= 1");
  if (!errors.empty()) throw InvalidConfig(std::move(errors));

  if (spec.modes.empty()) spec.modes = {Mode::kSync, Mode::kDp, Mode::kEdp};
  if (spec.levels.empty())
    spec.levels = {default_level("low", spec.base, 1.25), default_level("high", spec.base, 1.5)};
  if (spec.costs.empty()) spec.costs = {{"light", 0.25}, {"heavy", 1.0}};
  return spec;
}

SweepSpec load_sweep_spec(const std::filesystem::path& path) {
  return parse_sweep_spec(read_text_file(path), path.parent_path());
}

std::vector<std::pair<SweepCell, ValidatedConfig>> expand_sweep(const SweepSpec& spec) {
  std::vector<std::pair<SweepCell, ValidatedConfig>> cells;
  for (const auto& level : spec.levels)
    for (const auto& cost : spec.costs)
      for (const auto mode : spec.modes)
        for (int r = 0; r < spec.repeats; ++r) {
          ExperimentConfig config = spec.base;
          if (!level.speed_factors.empty()) config.speed_factors = level.speed_factors;
          if (!level.injected_delays.empty()) config.injected_delays = level.injected_delays;
          config.cost_per_sample = cost.cost_per_sample;
          config.mode = mode;
          config.seed = spec.base.seed + static_cast<std::uint64_t>(r);

          SweepCell cell;
          cell.level = level.name;
          cell.cost = cost.name;
          cell.mode = mode;
          cell.repeat = r;
          cell.dir = std::filesystem::path(level.name) / cost.name / std::string(to_string(mode)) /
                     fmt::format("rep{}", r);
          try {
            cells.emplace_back(cell, validate_config(config));
          } catch (const InvalidConfig& error) {
            auto violations = error.violations();
            for (auto& v : violations) v = fmt::format("cell {}: {}", cell.dir.generic_string(), v);
            throw InvalidConfig(std::move(violations));
          }
        }
  return cells;
}

double mean(const std::vector<double>& values) {
  if (values.empty()) return 0.0;
  return std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(values.size());
}

double sample_std(const std::vector<double>& values) {
  if (values.size() < 2) return 0.0;
  const double mu = mean(values);
  double acc = 0.0;
  for (double v : values) acc += (v - mu) * (v - mu);
  return std::sqrt(acc / static_cast<double>(values.size() - 1));
}

SweepResult run_sweep(const SweepSpec& spec, const std::filesystem::path& out_dir) {
  SweepResult result;
  for (auto& [cell, config] : expand_sweep(spec)) {
    const auto artifacts = run_training(config);
    export_run(artifacts, out_dir / cell.dir);
    cell.total_time = artifacts.total_time;
    cell.final_loss = artifacts.final_loss;
    result.cells.push_back(cell);
  }

  for (const auto& level : spec.levels)
    for (const auto& cost : spec.costs)
      for (const auto mode : spec.modes) {
        std::vector<double> times;
        std::vector<double> losses;
        for (const auto& cell : result.cells)
          if (cell.level == level.name && cell.cost == cost.name && cell.mode == mode) {
            times.push_back(cell.total_time);
            losses.push_back(cell.final_loss);
          }
        result.rows.push_back({level.name, cost.name, mode, static_cast<int>(times.size()),
                               mean(times), sample_std(times), mean(losses), sample_std(losses)});
      }

  write_file_atomic(out_dir / "aggregate.csv", aggregate_csv(result));
  return result;
}

std::string aggregate_csv(const SweepResult& result) {
  std::string out = "level,cost,mode,repeats,time_mean,time_std,loss_mean,loss_std\n";
  for (const auto& row : result.rows)
    out += fmt::format("{},{},{},{},{},{},{},{}\n", row.level, row.cost, to_string(row.mode),
                       row.repeats, format_number(row.time_mean), format_number(row.time_std),
                       format_number(row.loss_mean), format_number(row.loss_std));
  return out;
}

std::string format_table(const SweepResult& result) {
  std::string out = fmt::format("{:<10} {:<10} {:<5} {:>4} {:>24} {:>26}\n", "level", "cost",
                                "mode", "reps", "total time (mean±std)", "final loss (mean±std)");
  std::map<std::pair<std::string, std::string>, double> sync_time;
  for (const auto& row : result.rows)
    if (row.mode == Mode::kSync) sync_time[{row.level, row.cost}] = row.time_mean;
  for (const auto& row : result.rows) {
    std::string speedup;
    if (const auto it = sync_time.find({row.level, row.cost});
        it != sync_time.end() && row.mode != Mode::kSync && row.time_mean > 0.0)
      speedup = fmt::format("  x{:.3f} vs sync", it->second / row.time_mean);
    out += fmt::format("{:<10} {:<10} {:<5} {:>4} {:>12.6g} ± {:<9.3g} {:>12.6g} ± {:<9.3g}{}\n",
                       row.level, row.cost, to_string(row.mode), row.repeats, row.time_mean,
                       row.time_std, row.loss_mean, row.loss_std, speedup);
  }
  return out;
}

}  // namespace hetsgd
