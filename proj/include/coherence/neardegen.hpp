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

#include <span>
#include <vector>

#include <Eigen/Dense>

#include "coherence/bath.hpp"
#include "coherence/bloch.hpp"
#include "coherence/dynamics.hpp"

namespace coherence {

/// Excited levels at omega1 <= omega2 with a small splitting delta = omega2 - omega1.
struct NearDegenerateSystem {
  /// Rejects omega1 <= 0, omega2 < omega1 and delta / omega1 >= max_relative_splitting.
  NearDegenerateSystem(double omega1, double omega2, double max_relative_splitting = 0.1);

  double omega1;
  double omega2;

  double delta() const noexcept { return omega2 - omega1; }
  /// Characteristic system time 1/omega1; the reduced dynamics is meant for
  /// tau_s << t << 1/delta.
  double tau_s() const noexcept { return 1.0 / omega1; }
  DegenerateSystem degenerate_limit() const { return DegenerateSystem(omega1); }
};

/// (rho22, rho00, rho+, rho-) with the dressed combination
///   rho+- = (e^{-i delta t} r21 +- e^{i delta t} r12) / 2
/// of interaction-picture entries r. The phases undo the interaction picture,
/// so for a Hermitian state rho+ stays real and rho- imaginary.
struct DressedCoherenceVector {
  Eigen::Vector4cd pi = Eigen::Vector4cd::Zero();

  static DressedCoherenceVector from_coherence(const CoherenceVector& v);
  /// Dress an interaction-picture state at time t.
  static DressedCoherenceVector from_interaction(const DensityMatrix& rho, double delta, double t);

  /// Undress at time t back to an interaction-picture state (excited
  /// coherence block only).
  DensityMatrix to_interaction(double delta, double t) const;
  /// Real parts of (rho22, rho00, rho+) and Im rho-; exact for Hermitian states.
  CoherenceVector to_coherence() const;
};

/// dPi/dt = m Pi - b with complex m (the splitting enters as -i delta).
struct DressedGenerator {
  Eigen::Matrix4cd m;
  Eigen::Vector4d b;
};

/// Rates are evaluated at omega1 and omega2; b uses the omega1 emission rate,
/// so delta = 0 reproduces coherence_generator exactly.
DressedGenerator neardegenerate_generator(const NearDegenerateSystem& sys, const BathSpec& bath);

/// Integrates the dressed coherence-vector equation. Emits a
/// "neardegen.validity_window" warning when t delta > 0.3 or t < tau_s.
DressedCoherenceVector evolve_neardegenerate(const DressedCoherenceVector& pi0,
                                             const NearDegenerateSystem& sys, const BathSpec& bath,
                                             double t, const EvolveOptions& opts = {});

struct DressedTrajectory {
  std::vector<double> times;
  std::vector<DressedCoherenceVector> states;
};

DressedTrajectory evolve_neardegenerate_trajectory(const DressedCoherenceVector& pi0,
                                                   const NearDegenerateSystem& sys,
                                                   const BathSpec& bath,
                                                   std::span<const double> times,
                                                   const EvolveOptions& opts = {});

/// Coefficients of the first-order-in-delta correction for aligned dipoles.
/// gamma = gamma_+ at omega1, x = exp(-beta omega1), and the primed rates are
/// forward difference quotients over the actual splitting.
///
/// b1 carries a factor (x gamma_+' - gamma_-') rather than (gamma_+' - gamma_-'):
/// only this form solves the first-order equation.
struct PerturbationCoefficients {
  double a1 = 0.0, a2 = 0.0, a3 = 0.0;
  double b1 = 0.0, b2 = 0.0, b3 = 0.0;
  double gamma = 0.0;
  double x = 0.0;
  double gamma_plus_prime = 0.0;
  double gamma_minus_prime = 0.0;
};

/// Requires delta > 0.
PerturbationCoefficients perturbation_coefficients(const CoherenceVector& init,
                                                   const NearDegenerateSystem& sys,
                                                   const BathSpec& bath);

/// Pi_1(t), the first-order correction with Pi_1(0) = 0. Zero when delta = 0.
Eigen::Vector4cd first_order_correction(const CoherenceVector& init,
                                        const NearDegenerateSystem& sys, const BathSpec& bath,
                                        double t);

/// Pi(t) + delta Pi_1(t), with Pi(t) the aligned closed form at omega1.
/// Rejects p != 1.
DressedCoherenceVector perturbative_solution(const CoherenceVector& init,
                                             const NearDegenerateSystem& sys,
                                             const BathSpec& bath, double t);

/// Infinite-time limit of the late-time dissipator: the two transitions
/// thermalize independently to diag(e^{-beta omega2}, e^{-beta omega1}, 1) / Z.
DensityMatrix thermalize_independent(const DensityMatrix& rho, const NearDegenerateSystem& sys,
                                     const BathSpec& bath);

/// Full non-secular dissipator acting on an interaction-picture state at time
/// t. The phase factors carry exp(+-i (k' - k) delta t); cross-check routine
/// for neardegenerate_generator.
Matrix3c nonsecular_dissipator(const Matrix3c& rho, const NearDegenerateSystem& sys,
                               const BathSpec& bath, double t);

/// Late-time dissipator: two independent two-level channels.
Matrix3c secular_dissipator(const Matrix3c& rho, const NearDegenerateSystem& sys,
                            const BathSpec& bath);

}  // namespace coherence
