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

#include "hetsgd/export.hpp"

#include <charconv>
#include <cmath>

#include <fmt/format.h>
#include <json.hpp>

#include "hetsgd/config_io.hpp"

namespace hetsgd {

namespace {

using Json = nlohmann::ordered_json;

// Round to 9 significant digits; the JSON writer then prints the shortest
// form that reproduces it. Non-finite values become null.
Json num(double value) {
  if (!std::isfinite(value)) return nullptr;
  const auto text = format_number(value);
  double rounded = value;
  std::from_chars(text.data(), text.data() + text.size(), rounded);
  return rounded;
}

template <typename T>
Json array(const std::vector<T>& values) {
  Json out = Json::array();
  for (const auto& v : values) {
    if constexpr (std::is_floating_point_v<T>)
      out.push_back(num(v));
    else
      out.push_back(v);
  }
  return out;
}

Json config_echo(const ExperimentConfig& config) {
  Json out = Json::object();
  for (const auto& entry : parse_key_values(to_config_text(config))) out[entry.key] = entry.value;
  return out;
}

}  // namespace

std::string format_number(double value) { return fmt::format("{:.9g}", value); }

std::string metrics_csv(const RunArtifacts& artifacts) {
  const int workers = artifacts.config.num_workers;
  std::string out = "epoch,iteration,clock,loss";
  for (int m = 0; m < workers; ++m) out += fmt::format(",compute_{}", m);
  out += '\n';
  for (const auto& r : artifacts.telemetry.records()) {
    out += fmt::format("{},{},{},{}", r.epoch, r.iteration, format_number(r.clock),
                       format_number(r.loss));
    for (double t : r.compute_times) {
      out += ',';
      out += format_number(t);
    }
    out += '\n';
  }
  return out;
}

std::string summary_json(const RunArtifacts& artifacts) {
  const auto& telemetry = artifacts.telemetry;
  Json root = Json::object();
  root["seed"] = artifacts.config.seed;
  root["config"] = config_echo(artifacts.config);
  root["total_time"] = num(artifacts.total_time);
  root["final_loss"] = num(artifacts.final_loss);
  root["iterations"] = telemetry.size();

  Json epochs = Json::array();
  for (const auto& e : artifacts.epochs) {
    Json item = Json::object();
    item["epoch"] = e.epoch;
    item["plan"] = array(e.plan.sizes);
    item["local_batch_sizes"] = array(e.local_batch_sizes);
    item["cp_raw"] = array(e.cp.raw);
    item["cp_normalized"] = array(e.cp.normalized);
    item["cp_source_epoch"] = e.cp.source_epoch;
    item["gradient_weights"] = array(e.weights);
    item["mean_batch_time"] = array(e.timing.mean_batch_time);
    item["samples_processed"] = array(e.timing.samples_processed);
    item["learning_rate"] = num(e.learning_rate);
    item["wall_time"] = num(e.wall_time);
    item["clock_end"] = num(e.clock_end);
    item["loss"] = num(e.full_loss);
    item["accuracy"] = num(e.holdout_accuracy);
    epochs.push_back(std::move(item));
  }
  root["epochs"] = std::move(epochs);

  const auto& breakdown = telemetry.breakdown();
  root["breakdown"] = {{"compute_total", array(breakdown.compute_total)},
                       {"wait_total", array(breakdown.wait_total)}};

  Json histograms = Json::array();
  if (telemetry.size() > 0) {
    for (int m = 0; m < telemetry.num_workers(); ++m) {
      const auto hist = telemetry.build_histogram(m, artifacts.config.histogram_bins);
      histograms.push_back({{"worker_id", m},
                            {"bin_edges", array(hist.bin_edges)},
                            {"counts", array(hist.counts)}});
    }
  }
  root["histograms"] = std::move(histograms);
  root["final_params"] = array(artifacts.final_params);
  return root.dump(2) + "\n";
}

void export_run(const RunArtifacts& artifacts, const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw IoError(fmt::format("cannot create '{}': {}", dir.string(), ec.message()));
  write_file_atomic(dir / "metrics.csv", metrics_csv(artifacts));
  write_file_atomic(dir / "summary.json", summary_json(artifacts));
}

}  // namespace hetsgd
