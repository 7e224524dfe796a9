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

#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace hetsgd {

inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;  // config or runtime error
inline constexpr int kExitUsage = 2;

/// `hetsgd run <config>`, `hetsgd sweep <spec>`, `hetsgd validate <config>`.
/// Flags: --out <dir>, --seed <u64>, --mode <sync|dp|edp>,
/// --backend <virtual|realtime>.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);
int run_cli(int argc, char** argv);

}  // namespace hetsgd
