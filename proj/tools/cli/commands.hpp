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

#include <iosfwd>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "config.hpp"

namespace coherence::cli {

enum ExitCode : int { ok = 0, io_failure = 1, config_failure = 2, numerical_failure = 3 };

struct RunOptions {
  unsigned jobs = 1;  // grid points evaluated concurrently; 0 = all cores
};

struct RunOutcome {
  nlohmann::json summary;
  std::vector<std::string> files;  // paths written, in order
};

/// Executes one validated experiment and writes its output files.
RunOutcome run_experiment(const ExperimentConfig& cfg, const RunOptions& opts);

/// Full front end: argument parsing, config loading, execution, diagnostics
/// and exit codes. The summary goes to `out`, diagnostics to `err`.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace coherence::cli
