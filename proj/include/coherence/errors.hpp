// Copyright 2026 The coherence-engine Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <limits>
#include <stdexcept>
#include <string>

namespace coherence {

/// Violated precondition on a public operation (bad parameter, unphysical input).
class InvalidArgument : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A numerical kernel could not deliver a result (step underflow, non-convergence,
/// non-finite values).
class NumericalError : public std::runtime_error {
 public:
  explicit NumericalError(const std::string& what,
                          double reached_time = std::numeric_limits<double>::quiet_NaN())
      : std::runtime_error(what), reached_time_(reached_time) {}

  /// Time reached by an integrator before failing; NaN for non-integrator failures.
  double reached_time() const noexcept { return reached_time_; }

 private:
  double reached_time_;
};

}  // namespace coherence
