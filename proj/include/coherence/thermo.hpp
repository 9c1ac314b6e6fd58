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

#include "coherence/bloch.hpp"

namespace coherence {

/// Diagonal Hamiltonian diag(E2, E1, 0) in basis order (|2>, |1>, |0>).
struct HamiltonianSpec {
  double e2 = 1.0;
  double e1 = 1.0;

  static HamiltonianSpec degenerate(double omega) { return {omega, omega}; }
  static HamiltonianSpec split(double omega1, double omega2) { return {omega2, omega1}; }
  Matrix3c matrix() const;
  bool is_degenerate() const noexcept { return e1 == e2; }
};

/// Spectrum of a state whose only coherence is between the excited levels.
struct EigenTriple {
  double lambda0 = 0.0;
  double lambda_plus = 0.0;
  double lambda_minus = 0.0;
};

/// sum_{i != j} |rho_ij|.
double l1_coherence(const DensityMatrix& rho);

/// lambda0 = 1 - rho11 - rho22 and lambda+- = [rho11 + rho22 +- sqrt((rho11 - rho22)^2
/// + 4 |rho12|^2)] / 2. Rejects states with |rho20| or |rho10| above 1e-12.
EigenTriple eigen_subspace(const DensityMatrix& rho);

/// -Tr rho ln rho from the Hermitian eigenvalues; eigenvalues below 1e-300
/// (including tiny negative ones) contribute nothing.
double von_neumann_entropy(const DensityMatrix& rho);

/// Tr(rho H) - S(rho) / beta.
double free_energy(const DensityMatrix& rho, const HamiltonianSpec& h, double beta);

/// e^{-beta H} / Z.
DensityMatrix gibbs(const HamiltonianSpec& h, double beta);

/// F(rho) - F(gibbs(h, beta)); the maximal extractable work.
double fed(const DensityMatrix& rho, const HamiltonianSpec& h, double beta);

/// The same quantity for a degenerate H through the subspace spectrum:
///   omega (rho11 + rho22) + (1/beta) [sum lambda ln lambda + ln(1 + 2 e^{-beta omega})].
double fed_subspace(const DensityMatrix& rho, double omega, double beta);

}  // namespace coherence
