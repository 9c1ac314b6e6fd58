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

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>

#include <nlohmann/json.hpp>

#include "coherence/bath.hpp"
#include "coherence/bloch.hpp"
#include "coherence/dynamics.hpp"
#include "coherence/protocols.hpp"

namespace coherence::cli {

/// Bad or inconsistent configuration. `path` is a JSON-pointer-like location
/// ("/task/t_final") or empty when the problem is not tied to one key.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(std::string path, const std::string& what)
      : std::runtime_error(what), path_(std::move(path)) {}
  const std::string& path() const noexcept { return path_; }

 private:
  std::string path_;
};

enum class Command { evolve, steady, protocol1, protocol2, figure_wfed, neardegen_check };

std::string_view command_name(Command c);
std::optional<Command> parse_command(std::string_view name);

struct SystemSpec {
  double omega1 = 1.0;
  double omega2 = 1.0;
  bool degenerate() const noexcept { return omega1 == omega2; }
};

/// How the initial state is named in a config. `steady` and `gibbs` depend on
/// the bath and are resolved per run (a beta sweep gets one per grid point).
struct InitialSpec {
  enum class Kind { ground, gibbs, steady, coherence, general };
  Kind kind = Kind::ground;
  CoherenceVector coherence{};   // kind == coherence: (a, b, c, d)
  GeneralInitialState general{}; // kind == general
};

struct OutputSpec {
  std::string dir = ".";
  std::string prefix;  // defaults to the subcommand name
};

/// Scalar flags that override config fields.
struct Overrides {
  std::optional<double> beta;
  std::optional<double> omega;
  std::optional<double> alignment;
  std::optional<std::string> out;
};

struct ExperimentConfig {
  Command command = Command::evolve;
  SystemSpec system;
  BathSpec bath{1.0, RateProfile::constant(1.0), 1.0};
  std::optional<InitialSpec> initial;  // unset: the subcommand's default
  nlohmann::json task = nlohmann::json::object();  // validated, defaults filled in
  OutputSpec output;
  /// The effective document after overrides; what the hash is computed from.
  nlohmann::json effective;
  std::uint64_t hash = 0;
};

/// Folds the flag overrides into the raw document (creating sections as needed).
nlohmann::json apply_overrides(nlohmann::json doc, const Overrides& o);

/// Validates a document for a subcommand. Unknown keys anywhere are rejected.
ExperimentConfig parse_config(Command command, const nlohmann::json& doc);

/// Strict JSON from a file; comments and trailing commas are errors.
nlohmann::json load_config_file(const std::string& path);

/// 64-bit FNV-1a.
std::uint64_t fnv1a(std::string_view bytes);

/// Hash of the subcommand plus the effective document without the "output"
/// section, so the same experiment written to two directories is identical.
std::uint64_t config_hash(Command command, const nlohmann::json& effective);

std::string hash_hex(std::uint64_t h);

DensityMatrix resolve_initial(const InitialSpec& spec, const SystemSpec& sys, const BathSpec& bath);

}  // namespace coherence::cli
