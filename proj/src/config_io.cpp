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

#include "hetsgd/config_io.hpp"

#include <cerrno>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>
#include <system_error>

#include <fmt/format.h>

namespace hetsgd {

namespace {

std::string_view trim(std::string_view text) {
  const auto first = text.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = text.find_last_not_of(" \t\r");
  return text.substr(first, last - first + 1);
}

[[noreturn]] void fail(const KeyValue& entry, std::string_view what) {
  throw InvalidConfig({fmt::format("line {}: {} = '{}': {}", entry.line, entry.key, entry.value,
                                   what)});
}

template <typename T>
T parse_integer(const KeyValue& entry) {
  T value{};
  const auto text = trim(entry.value);
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || ptr != text.data() + text.size()) fail(entry, "expected an integer");
  return value;
}

double parse_double(std::string_view text, const KeyValue& entry) {
  text = trim(text);
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || ptr != text.data() + text.size() || text.empty())
    fail(entry, "expected a number");
  return value;
}

std::vector<double> parse_list(const KeyValue& entry) {
  std::vector<double> values;
  std::string_view rest = entry.value;
  if (trim(rest).empty()) return values;
  while (true) {
    const auto comma = rest.find(',');
    values.push_back(parse_double(rest.substr(0, comma), entry));
    if (comma == std::string_view::npos) break;
    rest.remove_prefix(comma + 1);
  }
  return values;
}

bool parse_bool_word(const KeyValue& entry, std::string_view yes, std::string_view no) {
  const auto text = trim(entry.value);
  if (text == yes) return true;
  if (text == no) return false;
  fail(entry, fmt::format("expected {} or {}", yes, no));
}

std::string number(double value) { return fmt::format("{}", value); }

std::string list(const std::vector<double>& values) {
  std::string out;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i) out += ", ";
    out += number(values[i]);
  }
  return out;
}

}  // namespace

std::vector<double> parse_number_list(const KeyValue& entry) { return parse_list(entry); }

std::int64_t parse_integer_value(const KeyValue& entry) {
  return parse_integer<std::int64_t>(entry);
}

std::vector<KeyValue> parse_key_values(std::string_view text) {
  std::vector<KeyValue> entries;
  std::set<std::string, std::less<>> seen;
  int line_no = 0;
  while (!text.empty()) {
    ++line_no;
    const auto newline = text.find('\n');
    auto line = text.substr(0, newline);
    text = newline == std::string_view::npos ? std::string_view{} : text.substr(newline + 1);

    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;

    const auto eq = line.find('=');
    if (eq == std::string_view::npos)
      throw InvalidConfig({fmt::format("line {}: expected 'key = value'", line_no)});
    KeyValue entry{std::string(trim(line.substr(0, eq))), std::string(trim(line.substr(eq + 1))),
                   line_no};
    if (entry.key.empty()) throw InvalidConfig({fmt::format("line {}: empty key", line_no)});
    if (!seen.insert(entry.key).second)
      throw InvalidConfig({fmt::format("line {}: duplicate key '{}'", line_no, entry.key)});
    entries.push_back(std::move(entry));
  }
  return entries;
}

bool apply_config_key(ExperimentConfig& c, const KeyValue& e) {
  const auto& k = e.key;
  const auto word = [&] { return trim(e.value); };
  try {
    if (k == "num_workers") c.num_workers = parse_integer<int>(e);
    else if (k == "dataset_size") c.dataset_size = parse_integer<std::int64_t>(e);
    else if (k == "global_batch_size") c.global_batch_size = parse_integer<std::int64_t>(e);
    else if (k == "epochs") c.epochs = parse_integer<int>(e);
    else if (k == "mode") c.mode = parse_mode(word());
    else if (k == "cp_estimator")
      c.cp_estimator.kind = parse_bool_word(e, "ema", "last_epoch") ? CpEstimatorKind::kEma
                                                                    : CpEstimatorKind::kLastEpoch;
    else if (k == "ema_decay") c.cp_estimator.decay = parse_double(e.value, e);
    else if (k == "timing_backend") c.timing_backend = parse_backend(word());
    else if (k == "eta_max") c.optimizer.eta_max = parse_double(e.value, e);
    else if (k == "eta_min") c.optimizer.eta_min = parse_double(e.value, e);
    else if (k == "momentum") c.optimizer.momentum = parse_double(e.value, e);
    else if (k == "weight_decay") c.optimizer.weight_decay = parse_double(e.value, e);
    else if (k == "seed") c.seed = parse_integer<std::uint64_t>(e);
    else if (k == "speed_factors") c.speed_factors = parse_list(e);
    else if (k == "injected_delays") c.injected_delays = parse_list(e);
    else if (k == "noise_std") c.noise_std = parse_list(e);
    else if (k == "model") c.model = parse_model_kind(word());
    else if (k == "feature_dim") c.feature_dim = parse_integer<int>(e);
    else if (k == "hidden_width") c.hidden_width = parse_integer<int>(e);
    else if (k == "cost_per_sample") c.cost_per_sample = parse_double(e.value, e);
    else if (k == "batch_semantics")
      c.batch_semantics = parse_bool_word(e, "fixed", "proportional")
                              ? BatchSemantics::kFixed
                              : BatchSemantics::kProportional;
    else if (k == "gradient_weighting")
      c.gradient_weighting = parse_bool_word(e, "sample", "uniform") ? GradientWeighting::kSample
                                                                     : GradientWeighting::kUniform;
    else if (k == "execution")
      c.execution = parse_bool_word(e, "serial", "parallel") ? ExecutionPolicy::kSerial
                                                             : ExecutionPolicy::kParallel;
    else if (k == "histogram_bins") c.histogram_bins = parse_integer<int>(e);
    else return false;
  } catch (const InvalidConfig& error) {
    // Add the line number to errors raised by the enum parsers.
    if (error.violations().size() == 1 && error.violations()[0].rfind("line ", 0) != 0)
      fail(e, error.violations()[0]);
    throw;
  }
  return true;
}

ExperimentConfig parse_config_text(std::string_view text) {
  ExperimentConfig config;
  std::vector<std::string> unknown;
  for (const auto& entry : parse_key_values(text))
    if (!apply_config_key(config, entry))
      unknown.push_back(fmt::format("line {}: unknown key '{}'", entry.line, entry.key));
  if (!unknown.empty()) throw InvalidConfig(std::move(unknown));
  return config;
}

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError(fmt::format("cannot open '{}': file not found or unreadable", path.string()));
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

ExperimentConfig load_config_file(const std::filesystem::path& path) {
  return parse_config_text(read_text_file(path));
}

std::string to_config_text(const ExperimentConfig& c) {
  std::string out;
  const auto put = [&out](std::string_view key, const std::string& value) {
    out += fmt::format("{} = {}\n", key, value);
  };
  put("num_workers", std::to_string(c.num_workers));
  put("dataset_size", std::to_string(c.dataset_size));
  put("global_batch_size", std::to_string(c.global_batch_size));
  put("epochs", std::to_string(c.epochs));
  put("mode", std::string(to_string(c.mode)));
  put("cp_estimator", std::string(to_string(c.cp_estimator.kind)));
  put("ema_decay", number(c.cp_estimator.decay));
  put("timing_backend", std::string(to_string(c.timing_backend)));
  put("eta_max", number(c.optimizer.eta_max));
  put("eta_min", number(c.optimizer.eta_min));
  put("momentum", number(c.optimizer.momentum));
  put("weight_decay", number(c.optimizer.weight_decay));
  put("seed", std::to_string(c.seed));
  put("speed_factors", list(c.speed_factors));
  put("injected_delays", list(c.injected_delays));
  put("noise_std", list(c.noise_std));
  put("model", std::string(to_string(c.model)));
  put("feature_dim", std::to_string(c.feature_dim));
  put("hidden_width", std::to_string(c.hidden_width));
  put("cost_per_sample", number(c.cost_per_sample));
  put("batch_semantics", std::string(to_string(c.batch_semantics)));
  put("gradient_weighting", std::string(to_string(c.gradient_weighting)));
  put("execution", std::string(to_string(c.execution)));
  put("histogram_bins", std::to_string(c.histogram_bins));
  return out;
}

void write_file_atomic(const std::filesystem::path& path, std::string_view contents) {
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError(fmt::format("cannot write '{}'", tmp.string()));
    out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
    out.flush();
    if (!out) throw IoError(fmt::format("short write to '{}'", tmp.string()));
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp, ec);
    throw IoError(fmt::format("cannot rename into '{}'", path.string()));
  }
}

}  // namespace hetsgd
