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

#include <functional>
#include <optional>
#include <string>
#include <string_view>

#include <nlohmann/json.hpp>

namespace coherence::diagnostics {

enum class Severity { error = 0, warn = 1, info = 2, debug = 3 };

struct Record {
  Severity severity;
  std::string event;
  nlohmann::json fields;
};

using Sink = std::function<void(const Record&)>;

/// Parses "error" | "warn" | "info" | "debug".
std::optional<Severity> parse_severity(std::string_view name);
std::string_view to_string(Severity s);

/// Records above this level are dropped. Initialised from COHERENCE_ENGINE_LOG
/// (default warn).
Severity threshold();
void set_threshold(Severity s);

/// Sends a structured record to the active sink; the default sink writes one
/// JSON object per line to stderr. Thread-safe.
void emit(Severity severity, std::string_view event, nlohmann::json fields = nlohmann::json::object());

/// Redirects records to `sink` for the lifetime of the guard (tests, CLI).
class ScopedSink {
 public:
  explicit ScopedSink(Sink sink);
  ~ScopedSink();
  ScopedSink(const ScopedSink&) = delete;
  ScopedSink& operator=(const ScopedSink&) = delete;

 private:
  Sink previous_;
};

}  // namespace coherence::diagnostics
