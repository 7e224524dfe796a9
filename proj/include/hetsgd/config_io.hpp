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

// Flat `key = value` configuration files.
//
//   # comment
//   num_workers = 2
//   speed_factors = 1, 2
//
// Keys mirror ExperimentConfig field names; optimizer fields and the
// estimator decay are top-level keys (eta_max, momentum, ema_decay, ...).

#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "hetsgd/core.hpp"

namespace hetsgd {

struct KeyValue {
  std::string key;
  std::string value;
  int line = 0;
};

/// Splits text into ordered key/value entries. Blank lines and `#` comments
/// are skipped. Malformed lines and duplicate keys throw InvalidConfig.
std::vector<KeyValue> parse_key_values(std::string_view text);

/// Comma-separated numbers; throws InvalidConfig naming the line.
std::vector<double> parse_number_list(const KeyValue& entry);
std::int64_t parse_integer_value(const KeyValue& entry);

/// Applies one entry to config. Returns false for keys it does not know.
bool apply_config_key(ExperimentConfig& config, const KeyValue& entry);

/// Parses a full config; unknown keys are errors. Does not validate.
ExperimentConfig parse_config_text(std::string_view text);

/// Reads and parses a file. Throws IoError when it cannot be read.
ExperimentConfig load_config_file(const std::filesystem::path& path);

/// Every key in a fixed order, with round-trip exact numbers.
std::string to_config_text(const ExperimentConfig& config);

std::string read_text_file(const std::filesystem::path& path);

/// Writes to a sibling temp file and renames it over path, so readers never
/// observe a partial file.
void write_file_atomic(const std::filesystem::path& path, std::string_view contents);

}  // namespace hetsgd
