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

// Run exports.
//
// metrics.csv   epoch,iteration,clock,loss,compute_0,...,compute_{M-1}
//               one row per iteration, "\n" line endings.
// summary.json  config echo, seed, per-epoch plans / CP estimates / loss,
//               per-worker time breakdown and batch-time histograms.
//
// Numbers are written with 9 significant digits, independent of locale.

#pragma once

#include <filesystem>
#include <string>

#include "hetsgd/engine.hpp"

namespace hetsgd {

/// Locale-independent "%.9g".
std::string format_number(double value);

std::string metrics_csv(const RunArtifacts& artifacts);
std::string summary_json(const RunArtifacts& artifacts);

/// Writes metrics.csv and summary.json into dir (created if missing).
void export_run(const RunArtifacts& artifacts, const std::filesystem::path& dir);

}  // namespace hetsgd
