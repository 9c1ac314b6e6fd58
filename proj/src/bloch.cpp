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

#include "coherence/bloch.hpp"

#include <algorithm>
#include <cmath>

#include "coherence/errors.hpp"

namespace coherence {

namespace {

constexpr Complex kI{0.0, 1.0};

Matrix3c hermitian_part(const Matrix3c& m) { return 0.5 * (m + m.adjoint()); }

BasisMatrices build_basis() {
  BasisMatrices basis;
  auto& l = basis.gell_mann;
  for (auto& m : l) m.setZero();
  l[0](0, 1) = 1.0;
  l[0](1, 0) = 1.0;
  l[1](0, 1) = -kI;
  l[1](1, 0) = kI;
  l[2](0, 0) = 1.0;
  l[2](1, 1) = -1.0;
  l[3](0, 2) = 1.0;
  l[3](2, 0) = 1.0;
  l[4](0, 2) = -kI;
  l[4](2, 0) = kI;
  l[5](1, 2) = 1.0;
  l[5](2, 1) = 1.0;
  l[6](1, 2) = -kI;
  l[6](2, 1) = kI;
  const double inv_sqrt3 = 1.0 / std::sqrt(3.0);
  l[7](0, 0) = inv_sqrt3;
  l[7](1, 1) = inv_sqrt3;
  l[7](2, 2) = -2.0 * inv_sqrt3;

  auto& p = basis.ladder;
  p[0] = (l[0] + kI * l[1]) / 2.0;  // T+
  p[1] = (l[0] - kI * l[1]) / 2.0;  // T-
  p[2] = (l[3] + kI * l[4]) / 2.0;  // V+
  p[3] = (l[3] - kI * l[4]) / 2.0;  // V-
  p[4] = (l[5] + kI * l[6]) / 2.0;  // U+
  p[5] = (l[5] - kI * l[6]) / 2.0;  // U-
  p[6] = (std::sqrt(3.0) * l[7] + l[2]) / 2.0;  // V3
  p[7] = (std::sqrt(3.0) * l[7] - l[2]) / 2.0;  // U3
  return basis;
}

}  // namespace

DensityMatrix::DensityMatrix() : m_(Matrix3c::Zero()) { m_(2, 2) = 1.0; }

DensityMatrix DensityMatrix::ground() { return DensityMatrix(); }

DensityMatrix DensityMatrix::maximally_mixed() {
  return DensityMatrix(Matrix3c::Identity() / 3.0);
}

DensityMatrix DensityMatrix::diagonal(double p2, double p1, double p0) {
  Matrix3c m = Matrix3c::Zero();
  m(0, 0) = p2;
  m(1, 1) = p1;
  m(2, 2) = p0;
  return DensityMatrix(m);
}

PhysicalityReport check_physical(const DensityMatrix& rho, const PhysicalityTolerances& tol) {
  const Matrix3c& m = rho.matrix();
  PhysicalityReport report;
  report.hermiticity_error = (m - m.adjoint()).cwiseAbs().maxCoeff();
  report.trace_error = std::abs(m.trace() - Complex{1.0, 0.0});
  report.min_eigenvalue = min_eigenvalue(rho);
  report.hermitian = report.hermiticity_error <= tol.hermiticity;
  report.unit_trace = report.trace_error <= tol.trace;
  report.positive = report.min_eigenvalue >= -tol.negativity;
  return report;
}

double min_eigenvalue(const DensityMatrix& rho) {
  Eigen::SelfAdjointEigenSolver<Matrix3c> solver(hermitian_part(rho.matrix()),
                                                  Eigen::EigenvaluesOnly);
  return solver.eigenvalues().minCoeff();
}

double trace_distance(const DensityMatrix& rho, const DensityMatrix& sigma) {
  Eigen::SelfAdjointEigenSolver<Matrix3c> solver(
      hermitian_part(rho.matrix() - sigma.matrix()), Eigen::EigenvaluesOnly);
  return 0.5 * solver.eigenvalues().cwiseAbs().sum();
}

const BasisMatrices& gellmann_basis() {
  static const BasisMatrices basis = build_basis();
  return basis;
}

BlochVector to_bloch(const DensityMatrix& rho) {
  const Matrix3c& m = rho.matrix();
  const double herm = (m - m.adjoint()).cwiseAbs().maxCoeff();
  if (herm > 1e-12) {
    throw InvalidArgument("to_bloch: density matrix is not Hermitian (max deviation " +
                          std::to_string(herm) + ")");
  }
  const double tr = std::abs(m.trace() - Complex{1.0, 0.0});
  if (tr > 1e-12) {
    throw InvalidArgument("to_bloch: density matrix trace differs from 1 by " +
                          std::to_string(tr));
  }
  BlochVector q;
  q(1) = 3.0 * m(0, 1);
  q(2) = 3.0 * m(1, 0);
  q(3) = 3.0 * m(0, 2);
  q(4) = 3.0 * m(2, 0);
  q(5) = 3.0 * m(1, 2);
  q(6) = 3.0 * m(2, 1);
  q(7) = 3.0 * m(0, 0) - 1.0;
  q(8) = 3.0 * m(1, 1) - 1.0;
  return q;
}

DensityMatrix from_bloch(const BlochVector& q) {
  Matrix3c m;
  m(0, 0) = (1.0 + q(7)) / 3.0;
  m(1, 1) = (1.0 + q(8)) / 3.0;
  // Ground population from the trace condition keeps Tr = 1 exactly.
  m(2, 2) = 1.0 - m(0, 0) - m(1, 1);
  m(0, 1) = q(1) / 3.0;
  m(1, 0) = q(2) / 3.0;
  m(0, 2) = q(3) / 3.0;
  m(2, 0) = q(4) / 3.0;
  m(1, 2) = q(5) / 3.0;
  m(2, 1) = q(6) / 3.0;
  return DensityMatrix(m);
}

}  // namespace coherence
