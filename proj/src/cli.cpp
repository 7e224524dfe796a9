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

#include "hetsgd/cli.hpp"

#include <cmath>
#include <iostream>
#include <optional>

#include <CLI11.hpp>
#include <fmt/format.h>
#include <fmt/ostream.h>

#include "hetsgd/config_io.hpp"
#include "hetsgd/engine.hpp"
#include "hetsgd/export.hpp"
#include "hetsgd/sweep.hpp"

namespace hetsgd {

namespace {

struct Overrides {
  std::string out = "hetsgd_out";
  std::uint64_t seed = 0;
  std::string mode;
  std::string backend;
  bool seed_set = false;

  void apply(ExperimentConfig& config) const {
    if (seed_set) config.seed = seed;
    if (!mode.empty()) config.mode = parse_mode(mode);
    if (!backend.empty()) config.timing_backend = parse_backend(backend);
  }
};

void add_common_flags(CLI::App& command, Overrides& overrides, std::string& input,
                      std::string_view input_name) {
  command.add_option(std::string(input_name), input, "input file")->required();
  command.add_option("--out", overrides.out, "output directory");
  command.add_option("--seed", overrides.seed, "override the config seed");
  command.add_option("--mode", overrides.mode, "override the mode: sync, dp or edp");
  command.add_option("--backend", overrides.backend, "override the timing backend: virtual or realtime");
}

void print_run(std::ostream& out, const RunArtifacts& artifacts) {
  fmt::print(out, "{:>5} {:>10} {:>12} {:>12} {:>10}  {}\n", "epoch", "lr", "wall time", "loss",
             "accuracy", "plan");
  for (const auto& e : artifacts.epochs) {
    std::string plan;
    for (auto s : e.plan.sizes) plan += fmt::format("{}{}", plan.empty() ? "" : " ", s);
    const auto accuracy = std::isnan(e.holdout_accuracy) ? std::string("-")
                                                        : fmt::format("{:.4f}", e.holdout_accuracy);
    fmt::print(out, "{:>5} {:>10.4g} {:>12.6g} {:>12.6g} {:>10}  {}\n", e.epoch, e.learning_rate,
               e.wall_time, e.full_loss, accuracy, plan);
  }
  fmt::print(out, "total time {:.6g}, final loss {:.6g}\n", artifacts.total_time,
             artifacts.final_loss);
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Synchronous data-parallel SGD with dynamic partitioning on heterogeneous workers",
               "hetsgd"};
  app.require_subcommand(1);

  Overrides run_flags, sweep_flags, validate_flags;
  std::string run_input, sweep_input, validate_input;
  auto* run = app.add_subcommand("run", "run one experiment and export telemetry");
  add_common_flags(*run, run_flags, run_input, "config");
  auto* sweep = app.add_subcommand("sweep", "run a mode x heterogeneity grid");
  add_common_flags(*sweep, sweep_flags, sweep_input, "spec");
  auto* validate = app.add_subcommand("validate", "validate a config and print it normalized");
  add_common_flags(*validate, validate_flags, validate_input, "config");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& error) {
    const int code = app.exit(error, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }
  for (auto* command : {run, sweep, validate}) {
    auto* flags = command == run ? &run_flags : command == sweep ? &sweep_flags : &validate_flags;
    flags->seed_set = command->count("--seed") > 0;
  }

  try {
    if (*validate) {
      auto config = load_config_file(validate_input);
      validate_flags.apply(config);
      out << to_config_text(validate_config(config).get());
    } else if (*run) {
      auto config = load_config_file(run_input);
      run_flags.apply(config);
      const auto validated = validate_config(config);
      const auto artifacts = run_training(validated);
      export_run(artifacts, run_flags.out);
      print_run(out, artifacts);
      fmt::print(out, "wrote {}/metrics.csv and {}/summary.json\n", run_flags.out, run_flags.out);
    } else if (*sweep) {
      auto spec = load_sweep_spec(sweep_input);
      if (sweep_flags.seed_set) spec.base.seed = sweep_flags.seed;
      if (!sweep_flags.mode.empty()) spec.modes = {parse_mode(sweep_flags.mode)};
      if (!sweep_flags.backend.empty()) spec.base.timing_backend = parse_backend(sweep_flags.backend);
      const auto result = run_sweep(spec, sweep_flags.out);
      out << format_table(result);
      fmt::print(out, "wrote {} cells and {}/aggregate.csv\n", result.cells.size(), sweep_flags.out);
    }
  } catch (const InvalidConfig& error) {
    err << "error: invalid config\n";
    for (const auto& v : error.violations()) err << "  " << v << '\n';
    return kExitFailure;
  } catch (const std::exception& error) {
    err << "error: " << error.what() << '\n';
    return kExitFailure;
  }
  return kExitOk;
}

int run_cli(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return run_cli(args, std::cout, std::cerr);
}

}  // namespace hetsgd
