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

#include <stdexcept>
#include <string>
#include <vector>

namespace hetsgd {

/// Base of every error thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Carries one message per violated constraint.
class InvalidConfig : public Error {
 public:
  explicit InvalidConfig(std::vector<std::string> violations);
  const std::vector<std::string>& violations() const { return violations_; }

 private:
  std::vector<std::string> violations_;
};

#define HETSGD_DEFINE_ERROR(Name)  \
  class Name : public Error {      \
   public:                         \
    using Error::Error;            \
  }

HETSGD_DEFINE_ERROR(EmptyInput);
HETSGD_DEFINE_ERROR(NegativeDelta);
HETSGD_DEFINE_ERROR(NonPositiveTime);
HETSGD_DEFINE_ERROR(NonPositiveCp);
HETSGD_DEFINE_ERROR(EmptyHistory);
HETSGD_DEFINE_ERROR(InvalidWeights);
HETSGD_DEFINE_ERROR(MissingTimings);
HETSGD_DEFINE_ERROR(DimensionMismatch);
HETSGD_DEFINE_ERROR(EpochOutOfRange);
HETSGD_DEFINE_ERROR(IndexOutOfRange);
HETSGD_DEFINE_ERROR(WorkerFailure);
HETSGD_DEFINE_ERROR(NoData);
HETSGD_DEFINE_ERROR(OutOfOrderRecord);
HETSGD_DEFINE_ERROR(IoError);

#undef HETSGD_DEFINE_ERROR

}  // namespace hetsgd
