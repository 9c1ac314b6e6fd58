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

#include "coherence/diagnostics.hpp"

#include <atomic>
#include <cstdlib>
#include <iostream>
#include <mutex>

namespace coherence::diagnostics {

namespace {

std::mutex& sink_mutex() {
  static std::mutex m;
  return m;
}

void stderr_sink(const Record& r) {
  nlohmann::json line = {{"level", to_string(r.severity)}, {"event", r.event}};
  if (!r.fields.is_null() && !r.fields.empty()) line["fields"] = r.fields;
  std::cerr << line.dump() << '\n';
}

Sink& active_sink() {
  static Sink sink = stderr_sink;
  return sink;
}

std::atomic<int>& threshold_storage() {
  static std::atomic<int> level = [] {
    const char* env = std::getenv("COHERENCE_ENGINE_LOG");
    const auto parsed = env ? parse_severity(env) : std::nullopt;
    return static_cast<int>(parsed.value_or(Severity::warn));
  }();
  return level;
}

}  // namespace

std::optional<Severity> parse_severity(std::string_view name) {
  if (name == "error") return Severity::error;
  if (name == "warn") return Severity::warn;
  if (name == "info") return Severity::info;
  if (name == "debug") return Severity::debug;
  return std::nullopt;
}

std::string_view to_string(Severity s) {
  switch (s) {
    case Severity::error: return "error";
    case Severity::warn: return "warn";
    case Severity::info: return "info";
    case Severity::debug: return "debug";
  }
  return "unknown";
}

Severity threshold() { return static_cast<Severity>(threshold_storage().load()); }

void set_threshold(Severity s) { threshold_storage().store(static_cast<int>(s)); }

void emit(Severity severity, std::string_view event, nlohmann::json fields) {
  if (static_cast<int>(severity) > threshold_storage().load()) return;
  Record record{severity, std::string(event), std::move(fields)};
  std::lock_guard lock(sink_mutex());
  active_sink()(record);
}

ScopedSink::ScopedSink(Sink sink) {
  std::lock_guard lock(sink_mutex());
  previous_ = std::move(active_sink());
  active_sink() = std::move(sink);
}

ScopedSink::~ScopedSink() {
  std::lock_guard lock(sink_mutex());
  active_sink() = std::move(previous_);
}

}  // namespace coherence::diagnostics
