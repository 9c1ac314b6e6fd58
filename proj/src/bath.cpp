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

#include "coherence/bath.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "coherence/errors.hpp"

namespace coherence {

RateProfile RateProfile::constant(double gamma_plus) {
  if (!(gamma_plus >= 0.0) || !std::isfinite(gamma_plus)) {
    throw InvalidArgument("emission rate must be finite and non-negative");
  }
  return RateProfile(gamma_plus);
}

RateProfile RateProfile::tabulated(std::vector<std::pair<double, double>> points) {
  if (points.size() < 2) {
    throw InvalidArgument("tabulated emission profile needs at least two points");
  }
  std::sort(points.begin(), points.end());
  for (std::size_t i = 0; i < points.size(); ++i) {
    const auto [omega, gamma] = points[i];
    if (!(omega > 0.0) || !std::isfinite(omega)) {
      throw InvalidArgument("tabulated emission profile: frequencies must be positive");
    }
    if (!(gamma >= 0.0) || !std::isfinite(gamma)) {
      throw InvalidArgument("tabulated emission profile: rates must be non-negative");
    }
    if (i > 0 && points[i - 1].first == omega) {
      throw InvalidArgument("tabulated emission profile: duplicate frequency");
    }
  }
  return RateProfile(std::move(points));
}

bool RateProfile::in_domain(double omega) const noexcept {
  if (const auto* table = std::get_if<Table>(&repr_)) {
    return omega >= table->front().first && omega <= table->back().first;
  }
  return omega > 0.0;
}

double RateProfile::operator()(double omega) const {
  if (const auto* value = std::get_if<double>(&repr_)) return *value;
  const auto& table = std::get<Table>(repr_);
  if (!in_domain(omega)) {
    throw InvalidArgument("frequency " + std::to_string(omega) +
                          " outside the tabulated emission profile");
  }
  auto hi = std::lower_bound(table.begin(), table.end(), omega,
                             [](const auto& point, double w) { return point.first < w; });
  if (hi == table.begin()) return hi->second;
  auto lo = std::prev(hi);
  const double s = (omega - lo->first) / (hi->first - lo->first);
  return lo->second + s * (hi->second - lo->second);
}

const std::vector<std::pair<double, double>>& RateProfile::points() const {
  if (const auto* table = std::get_if<Table>(&repr_)) return *table;
  throw InvalidArgument("constant emission profile has no table");
}

double RateProfile::constant_value() const {
  if (const auto* value = std::get_if<double>(&repr_)) return *value;
  throw InvalidArgument("tabulated emission profile has no single value");
}

BathSpec::BathSpec(double beta, RateProfile emission, double alignment)
    : beta_(beta), emission_(std::move(emission)), alignment_(alignment) {
  if (!(beta > 0.0) || !std::isfinite(beta)) {
    throw InvalidArgument("inverse temperature beta must be positive and finite");
  }
  if (!(std::abs(alignment) <= 1.0)) {
    throw InvalidArgument("dipole alignment must lie in [-1, 1]");
  }
}

RatePair rates_at(const BathSpec& bath, double omega) {
  if (!(omega > 0.0)) throw InvalidArgument("rates_at: frequency must be positive");
  const double gamma_plus = bath.emission()(omega);
  return {gamma_plus, std::exp(-bath.beta() * omega) * gamma_plus};
}

CrossRates cross_rates(const BathSpec& bath, double omega) {
  const RatePair r = rates_at(bath, omega);
  const double p = bath.alignment();
  CrossRates out;
  out.emission << r.gamma_plus, p * r.gamma_plus, p * r.gamma_plus, r.gamma_plus;
  out.absorption << r.gamma_minus, p * r.gamma_minus, p * r.gamma_minus, r.gamma_minus;
  return out;
}

RatePair rate_derivative(const BathSpec& bath, double omega, double delta) {
  if (!(delta > 0.0)) throw InvalidArgument("rate_derivative: step delta must be positive");
  const RatePair lo = rates_at(bath, omega);
  const RatePair hi = rates_at(bath, omega + delta);
  return {(hi.gamma_plus - lo.gamma_plus) / delta, (hi.gamma_minus - lo.gamma_minus) / delta};
}

BathSpec bath_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw InvalidArgument("bath: expected an object");
  for (const auto& [key, _] : j.items()) {
    if (key != "beta" && key != "gamma_plus" && key != "alignment") {
      throw InvalidArgument("bath: unknown key '" + key + "'");
    }
  }
  if (!j.contains("beta") || !j.at("beta").is_number()) {
    throw InvalidArgument("bath: 'beta' must be a number");
  }
  RateProfile profile = RateProfile::constant(1.0);
  if (j.contains("gamma_plus")) {
    const auto& g = j.at("gamma_plus");
    if (g.is_number()) {
      profile = RateProfile::constant(g.get<double>());
    } else if (g.is_object()) {
      for (const auto& [key, _] : g.items()) {
        if (key != "kind" && key != "points") {
          throw InvalidArgument("bath.gamma_plus: unknown key '" + key + "'");
        }
      }
      if (g.value("kind", std::string{}) != "tabulated") {
        throw InvalidArgument("bath.gamma_plus: only kind 'tabulated' is supported");
      }
      if (!g.contains("points") || !g.at("points").is_array()) {
        throw InvalidArgument("bath.gamma_plus: 'points' must be an array of [omega, gamma]");
      }
      std::vector<std::pair<double, double>> points;
      for (const auto& p : g.at("points")) {
        if (!p.is_array() || p.size() != 2 || !p[0].is_number() || !p[1].is_number()) {
          throw InvalidArgument("bath.gamma_plus: each point must be [omega, gamma]");
        }
        points.emplace_back(p[0].get<double>(), p[1].get<double>());
      }
      profile = RateProfile::tabulated(std::move(points));
    } else {
      throw InvalidArgument("bath.gamma_plus: expected a number or a tabulated profile");
    }
  }
  double alignment = 1.0;
  if (j.contains("alignment")) {
    if (!j.at("alignment").is_number()) throw InvalidArgument("bath: 'alignment' must be a number");
    alignment = j.at("alignment").get<double>();
  }
  return BathSpec(j.at("beta").get<double>(), std::move(profile), alignment);
}

nlohmann::json to_json(const BathSpec& bath) {
  nlohmann::json j;
  j["beta"] = bath.beta();
  j["alignment"] = bath.alignment();
  if (bath.emission().is_constant()) {
    j["gamma_plus"] = bath.emission().constant_value();
  } else {
    nlohmann::json points = nlohmann::json::array();
    for (const auto& [omega, gamma] : bath.emission().points()) points.push_back({omega, gamma});
    j["gamma_plus"] = {{"kind", "tabulated"}, {"points", points}};
  }
  return j;
}

}  // namespace coherence
