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

#include <utility>
#include <variant>
#include <vector>

#include <Eigen/Dense>
#include <nlohmann/json.hpp>

namespace coherence {

/// Emission rate gamma_+(omega) as a function of transition frequency.
///
/// Either a constant, or a table of (omega, gamma) points with linear
/// interpolation. Tabulated profiles are only defined on [omega_min, omega_max].
class RateProfile {
 public:
  RateProfile() : RateProfile(constant(1.0)) {}

  static RateProfile constant(double gamma_plus);
  static RateProfile tabulated(std::vector<std::pair<double, double>> points);

  bool is_constant() const noexcept { return std::holds_alternative<double>(repr_); }
  bool in_domain(double omega) const noexcept;
  double operator()(double omega) const;

  const std::vector<std::pair<double, double>>& points() const;
  double constant_value() const;

 private:
  using Table = std::vector<std::pair<double, double>>;
  explicit RateProfile(std::variant<double, Table> repr) : repr_(std::move(repr)) {}

  std::variant<double, Table> repr_;
};

/// Thermal bath: inverse temperature, emission profile and dipole alignment
/// p = cos(angle between the two transition dipoles). Absorption rates are
/// never stored; they follow from detailed balance.
class BathSpec {
 public:
  BathSpec(double beta, RateProfile emission, double alignment);

  double beta() const noexcept { return beta_; }
  double alignment() const noexcept { return alignment_; }
  const RateProfile& emission() const noexcept { return emission_; }

  BathSpec with_beta(double beta) const { return BathSpec(beta, emission_, alignment_); }
  BathSpec with_alignment(double p) const { return BathSpec(beta_, emission_, p); }

 private:
  double beta_;
  RateProfile emission_;
  double alignment_;
};

struct RatePair {
  double gamma_plus = 0.0;   // emission
  double gamma_minus = 0.0;  // absorption
};

/// (gamma_+(omega), exp(-beta omega) gamma_+(omega)). Rejects omega <= 0.
RatePair rates_at(const BathSpec& bath, double omega);

/// Channel-resolved rates Gamma^{+-}_{(ij)} = gamma_{+-} cos(Theta_ij) with
/// cos(Theta_ii) = 1 and cos(Theta_12) = p.
struct CrossRates {
  Eigen::Matrix2d emission;
  Eigen::Matrix2d absorption;
};

CrossRates cross_rates(const BathSpec& bath, double omega);

/// Forward difference quotient (rates_at(omega + delta) - rates_at(omega)) / delta.
RatePair rate_derivative(const BathSpec& bath, double omega, double delta);

BathSpec bath_from_json(const nlohmann::json& j);
nlohmann::json to_json(const BathSpec& bath);

}  // namespace coherence
