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


#include "config.hpp"

#include <cmath>
#include <fstream>
#include <initializer_list>
#include <iterator>
#include <vector>

#include "coherence/errors.hpp"
#include "coherence/thermo.hpp"

namespace coherence::cli {

using nlohmann::json;

namespace {

void only_keys(const json& obj, const std::string& path, std::initializer_list<std::string_view> allowed) {
  if (!obj.is_object()) throw ConfigError(path, "expected an object");
  for (const auto& [key, _] : obj.items()) {
    bool ok = false;
    for (auto a : allowed) ok = ok || key == a;
    if (!ok) throw ConfigError(path + "/" + key, "unknown key '" + key + "'");
  }
}

enum class Domain { any, positive, non_negative, unit_interval, open_unit_tol };

double number(const json& obj, const std::string& path, const char* key, std::optional<double> fallback,
              Domain domain = Domain::any) {
  const std::string where = path + "/" + key;
  if (!obj.contains(key)) {
    if (!fallback) throw ConfigError(where, std::string("missing required number '") + key + "'");
    return *fallback;
  }
  const json& v = obj.at(key);
  if (!v.is_number()) throw ConfigError(where, "expected a number");
  const double x = v.get<double>();
  if (!std::isfinite(x)) throw ConfigError(where, "must be finite");
  switch (domain) {
    case Domain::positive:
      if (!(x > 0.0)) throw ConfigError(where, "must be positive");
      break;
    case Domain::non_negative:
      if (!(x >= 0.0)) throw ConfigError(where, "must be non-negative");
      break;
    case Domain::unit_interval:
      if (!(x >= 0.0 && x <= 1.0)) throw ConfigError(where, "must lie in [0, 1]");
      break;
    case Domain::open_unit_tol:
      if (!(x > 0.0 && x <= 1e-2)) throw ConfigError(where, "tolerance must lie in (0, 1e-2]");
      break;
    case Domain::any:
      break;
  }
  return x;
}

long integer(const json& obj, const std::string& path, const char* key, long fallback, long min_value) {
  const std::string where = path + "/" + key;
  if (!obj.contains(key)) return fallback;
  const json& v = obj.at(key);
  if (!v.is_number_integer()) throw ConfigError(where, "expected an integer");
  const long x = v.get<long>();
  if (x < min_value) throw ConfigError(where, "must be at least " + std::to_string(min_value));
  return x;
}

bool boolean(const json& obj, const std::string& path, const char* key, bool fallback) {
  if (!obj.contains(key)) return fallback;
  if (!obj.at(key).is_boolean()) throw ConfigError(path + "/" + key, "expected true or false");
  return obj.at(key).get<bool>();
}

std::string choice(const json& obj, const std::string& path, const char* key, std::string fallback,
                   std::initializer_list<std::string_view> allowed) {
  const std::string where = path + "/" + key;
  if (!obj.contains(key)) return fallback;
  if (!obj.at(key).is_string()) throw ConfigError(where, "expected a string");
  const auto s = obj.at(key).get<std::string>();
  for (auto a : allowed) {
    if (s == a) return s;
  }
  std::string list;
  for (auto a : allowed) list += (list.empty() ? "" : ", ") + std::string(a);
  throw ConfigError(where, "expected one of: " + list);
}

std::vector<double> number_list(const json& obj, const std::string& path, const char* key,
                                Domain domain) {
  const std::string where = path + "/" + key;
  const json& v = obj.at(key);
  if (!v.is_array() || v.empty()) throw ConfigError(where, "expected a non-empty array of numbers");
  std::vector<double> out;
  json wrapper = json::object();
  for (std::size_t i = 0; i < v.size(); ++i) {
    wrapper["v"] = v[i];
    out.push_back(number(wrapper, where + "/" + std::to_string(i), "v", std::nullopt, domain));
  }
  return out;
}

SystemSpec parse_system(const json& j) {
  only_keys(j, "/system", {"omega", "omega1", "omega2"});
  SystemSpec s;
  if (j.contains("omega")) {
    if (j.contains("omega1") || j.contains("omega2")) {
      throw ConfigError("/system", "give either 'omega' or 'omega1'/'omega2', not both");
    }
    s.omega1 = s.omega2 = number(j, "/system", "omega", std::nullopt, Domain::positive);
  } else if (j.contains("omega1") || j.contains("omega2")) {
    s.omega1 = number(j, "/system", "omega1", std::nullopt, Domain::positive);
    s.omega2 = number(j, "/system", "omega2", std::nullopt, Domain::positive);
    if (s.omega2 < s.omega1) throw ConfigError("/system/omega2", "must be >= omega1");
  } else {
    throw ConfigError("/system", "needs 'omega' or 'omega1' and 'omega2'");
  }
  return s;
}

InitialSpec parse_initial(const json& j) {
  InitialSpec spec;
  const json obj = j.is_string() ? json{{"kind", j}} : j;
  if (!obj.is_object()) throw ConfigError("/initial", "expected a kind name or an object");
  const auto kind =
      choice(obj, "/initial", "kind", "", {"ground", "gibbs", "steady", "coherence", "general"});
  if (kind.empty()) throw ConfigError("/initial/kind", "missing 'kind'");
  if (kind == "ground" || kind == "gibbs" || kind == "steady") {
    only_keys(obj, "/initial", {"kind"});
    spec.kind = kind == "ground"  ? InitialSpec::Kind::ground
                : kind == "gibbs" ? InitialSpec::Kind::gibbs
                                  : InitialSpec::Kind::steady;
  } else if (kind == "coherence") {
    only_keys(obj, "/initial", {"kind", "a", "b", "c", "d"});
    spec.kind = InitialSpec::Kind::coherence;
    spec.coherence.rho22 = number(obj, "/initial", "a", std::nullopt, Domain::unit_interval);
    spec.coherence.rho00 = number(obj, "/initial", "b", std::nullopt, Domain::unit_interval);
    spec.coherence.rho_plus = number(obj, "/initial", "c", 0.0);
    spec.coherence.rho_minus_im = number(obj, "/initial", "d", 0.0);
    const auto report = check_physical(spec.coherence.to_density());
    if (!report.ok()) {
      throw ConfigError("/initial", "(a, b, c, d) is not a density matrix (min eigenvalue " +
                                        std::to_string(report.min_eigenvalue) + ")");
    }
  } else {
    only_keys(obj, "/initial", {"kind", "b", "n", "theta", "phi"});
    spec.kind = InitialSpec::Kind::general;
    spec.general.b = number(obj, "/initial", "b", std::nullopt, Domain::unit_interval);
    spec.general.n_norm = number(obj, "/initial", "n", std::nullopt, Domain::unit_interval);
    spec.general.theta = number(obj, "/initial", "theta", 0.0);
    spec.general.phi = number(obj, "/initial", "phi", 0.0);
  }
  return spec;
}

json evolve_options(const json& t, const std::string& p, json out) {
  out["abs_tol"] = number(t, p, "abs_tol", 1e-10, Domain::open_unit_tol);
  out["rel_tol"] = number(t, p, "rel_tol", 1e-10, Domain::open_unit_tol);
  out["method"] = choice(t, p, "method", "dopri5", {"dopri5", "rk4"});
  out["fixed_step"] = number(t, p, "fixed_step", 1e-3, Domain::positive);
  return out;
}

json parse_task(Command c, const json& t, const SystemSpec& sys, const BathSpec& bath) {
  const std::string p = "/task";
  if (!t.is_object()) throw ConfigError(p, "expected an object");
  json out = json::object();
  switch (c) {
    case Command::evolve:
      only_keys(t, p, {"t_final", "samples", "gibbs_tolerance", "abs_tol", "rel_tol", "method", "fixed_step"});
      if (!sys.degenerate()) {
        throw ConfigError("/system", "evolve needs a degenerate system; use neardegen-check for omega1 < omega2");
      }
      out["t_final"] = number(t, p, "t_final", 200.0, Domain::non_negative);
      out["samples"] = integer(t, p, "samples", 101, 1);
      out["gibbs_tolerance"] = number(t, p, "gibbs_tolerance", 1e-8, Domain::positive);
      return evolve_options(t, p, out);
    case Command::steady:
      only_keys(t, p, {});
      if (!sys.degenerate()) throw ConfigError("/system", "steady needs a degenerate system");
      return out;
    case Command::protocol1:
    case Command::figure_wfed:
      if (c == Command::figure_wfed) {
        only_keys(t, p, {"betas", "max_rounds", "shift_floor", "finite_time", "thermalization_time"});
        if (!t.contains("betas")) throw ConfigError(p + "/betas", "figure-wfed needs a beta grid");
        out["betas"] = number_list(t, p, "betas", Domain::positive);
      } else {
        only_keys(t, p, {"max_rounds", "shift_floor", "finite_time", "thermalization_time"});
      }
      if (!sys.degenerate()) throw ConfigError("/system", "the protocols need a degenerate system");
      if (bath.alignment() != 1.0) {
        throw ConfigError("/bath/alignment", "the repeated protocol needs aligned dipoles (alignment = 1)");
      }
      out["max_rounds"] = integer(t, p, "max_rounds", 1000, 1);
      out["shift_floor"] = number(t, p, "shift_floor", 1e-6, Domain::positive);
      out["finite_time"] = boolean(t, p, "finite_time", false);
      out["thermalization_time"] = number(t, p, "thermalization_time", 50.0, Domain::positive);
      return out;
    case Command::protocol2:
      only_keys(t, p, {"evaluation"});
      if (!sys.degenerate()) throw ConfigError("/system", "the protocols need a degenerate system");
      out["evaluation"] = choice(t, p, "evaluation", "closed_form", {"closed_form", "quadrature"});
      return out;
    case Command::neardegen_check:
      only_keys(t, p, {"relative_splittings", "t_final", "samples", "abs_tol", "rel_tol"});
      if (bath.alignment() != 1.0) {
        throw ConfigError("/bath/alignment", "the perturbative solution needs aligned dipoles (alignment = 1)");
      }
      if (t.contains("relative_splittings")) {
        out["relative_splittings"] = number_list(t, p, "relative_splittings", Domain::positive);
      } else if (sys.degenerate()) {
        throw ConfigError(p + "/relative_splittings",
                          "give omega1 < omega2 in /system or a list of relative splittings");
      }
      out["t_final"] = number(t, p, "t_final", 10.0, Domain::positive);
      out["samples"] = integer(t, p, "samples", 201, 2);
      out["abs_tol"] = number(t, p, "abs_tol", 1e-13, Domain::open_unit_tol);
      out["rel_tol"] = number(t, p, "rel_tol", 1e-13, Domain::open_unit_tol);
      return out;
  }
  return out;
}

}  // namespace

std::string_view command_name(Command c) {
  switch (c) {
    case Command::evolve: return "evolve";
    case Command::steady: return "steady";
    case Command::protocol1: return "protocol1";
    case Command::protocol2: return "protocol2";
    case Command::figure_wfed: return "figure-wfed";
    case Command::neardegen_check: return "neardegen-check";
  }
  return "?";
}

std::optional<Command> parse_command(std::string_view name) {
  for (auto c : {Command::evolve, Command::steady, Command::protocol1, Command::protocol2,
                 Command::figure_wfed, Command::neardegen_check}) {
    if (command_name(c) == name) return c;
  }
  return std::nullopt;
}

json apply_overrides(json doc, const Overrides& o) {
  if (doc.is_null()) doc = json::object();
  if (!doc.is_object()) throw ConfigError("", "config must be a JSON object");
  auto section = [&](const char* name) -> json& {
    json& s = doc[name];
    if (s.is_null()) s = json::object();
    if (!s.is_object()) throw ConfigError(std::string("/") + name, "expected an object");
    return s;
  };
  if (o.beta) section("bath")["beta"] = *o.beta;
  if (o.alignment) section("bath")["alignment"] = *o.alignment;
  if (o.omega) {
    json& s = section("system");
    s.erase("omega1");
    s.erase("omega2");
    s["omega"] = *o.omega;
  }
  if (o.out) section("output")["dir"] = *o.out;
  return doc;
}

ExperimentConfig parse_config(Command command, const json& doc) {
  only_keys(doc, "", {"system", "bath", "initial", "task", "output"});
  ExperimentConfig cfg;
  cfg.command = command;
  if (!doc.contains("system")) throw ConfigError("/system", "missing 'system' section");
  if (!doc.contains("bath")) throw ConfigError("/bath", "missing 'bath' section");
  cfg.system = parse_system(doc.at("system"));
  only_keys(doc.at("bath"), "/bath", {"beta", "gamma_plus", "alignment"});
  try {
    cfg.bath = bath_from_json(doc.at("bath"));
  } catch (const InvalidArgument& e) {
    throw ConfigError("/bath", e.what());
  }
  for (double w : {cfg.system.omega1, cfg.system.omega2}) {
    if (!cfg.bath.emission().in_domain(w)) {
      throw ConfigError("/bath/gamma_plus", "emission profile does not cover the system frequencies");
    }
  }
  if (doc.contains("initial")) cfg.initial = parse_initial(doc.at("initial"));
  cfg.task = parse_task(command, doc.value("task", json::object()), cfg.system, cfg.bath);
  if (doc.contains("output")) {
    const json& o = doc.at("output");
    only_keys(o, "/output", {"dir", "prefix"});
    for (const char* key : {"dir", "prefix"}) {
      if (o.contains(key) && (!o.at(key).is_string() || o.at(key).get<std::string>().empty())) {
        throw ConfigError(std::string("/output/") + key, "expected a non-empty string");
      }
    }
    cfg.output.dir = o.value("dir", cfg.output.dir);
    cfg.output.prefix = o.value("prefix", cfg.output.prefix);
  }
  if (cfg.output.prefix.empty()) cfg.output.prefix = std::string(command_name(command));
  if (cfg.output.prefix.find('/') != std::string::npos) {
    throw ConfigError("/output/prefix", "must be a file name prefix, not a path");
  }
  cfg.effective = doc;
  cfg.hash = config_hash(command, doc);
  return cfg;
}

json load_config_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("", "cannot open config file '" + path + "'");
  const std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError("", std::string("invalid JSON: ") + e.what());
  }
}

std::uint64_t fnv1a(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : bytes) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::uint64_t config_hash(Command command, const json& effective) {
  json hashed = effective;
  hashed.erase("output");
  return fnv1a(std::string(command_name(command)) + '\n' + hashed.dump());
}

std::string hash_hex(std::uint64_t h) {
  static const char* digits = "0123456789abcdef";
  std::string s(16, '0');
  for (int i = 15; i >= 0; --i, h >>= 4) s[static_cast<std::size_t>(i)] = digits[h & 0xF];
  return s;
}

DensityMatrix resolve_initial(const InitialSpec& spec, const SystemSpec& sys, const BathSpec& bath) {
  switch (spec.kind) {
    case InitialSpec::Kind::ground:
      return DensityMatrix::ground();
    case InitialSpec::Kind::gibbs:
      return gibbs(HamiltonianSpec::split(sys.omega1, sys.omega2), bath.beta());
    case InitialSpec::Kind::steady:
      if (!sys.degenerate()) throw ConfigError("/initial", "'steady' needs a degenerate system");
      return steady_state(DegenerateSystem(sys.omega1), bath, CoherenceVector{});
    case InitialSpec::Kind::coherence:
      return spec.coherence.to_density();
    case InitialSpec::Kind::general:
      return spec.general.density();
  }
  return DensityMatrix::ground();
}

}  // namespace coherence::cli
