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

#include <array>
#include <complex>

#include <Eigen/Dense>

namespace coherence {

using Complex = std::complex<double>;
using Matrix3c = Eigen::Matrix3cd;

/// Row/column index of an energy level. Every matrix in the library uses the
/// basis order (|2>, |1>, |0>): the upper excited level first, the ground
/// state last.
enum class Level : int { two = 0, one = 1, ground = 2 };

constexpr int index_of(Level level) noexcept { return static_cast<int>(level); }

/// A 3x3 density matrix in basis order (|2>, |1>, |0>).
///
/// Construction does not enforce physicality; integrators legitimately produce
/// states with O(1e-10) negativity. Use check_physical() where it matters.
class DensityMatrix {
 public:
  /// The ground state |0><0|.
  DensityMatrix();
  explicit DensityMatrix(const Matrix3c& m) : m_(m) {}

  static DensityMatrix ground();
  static DensityMatrix maximally_mixed();
  /// diag(p2, p1, p0).
  static DensityMatrix diagonal(double p2, double p1, double p0);

  const Matrix3c& matrix() const noexcept { return m_; }
  Complex operator()(Level row, Level col) const { return m_(index_of(row), index_of(col)); }
  double population(Level level) const { return m_(index_of(level), index_of(level)).real(); }

  Complex trace() const { return m_.trace(); }

 private:
  Matrix3c m_;
};

struct PhysicalityTolerances {
  double hermiticity = 1e-12;
  double trace = 1e-12;
  double negativity = 1e-10;
};

struct PhysicalityReport {
  double hermiticity_error = 0.0;  // max |rho_ij - conj(rho_ji)|
  double trace_error = 0.0;        // |Tr rho - 1|
  double min_eigenvalue = 0.0;     // of the Hermitian part
  bool hermitian = false;
  bool unit_trace = false;
  bool positive = false;

  bool ok() const noexcept { return hermitian && unit_trace && positive; }
};

PhysicalityReport check_physical(const DensityMatrix& rho, const PhysicalityTolerances& tol = {});

/// Smallest eigenvalue of the Hermitian part of rho.
double min_eigenvalue(const DensityMatrix& rho);

/// Trace distance (1/2) ||rho - sigma||_1.
double trace_distance(const DensityMatrix& rho, const DensityMatrix& sigma);

/// Generalized Bloch vector q_1..q_8 in the ladder basis P_1..P_8:
///   rho = (1/3) (I + sum_k q_k P_k).
///
/// The ladder basis is not Hermitian, so the off-diagonal components are
/// complex. For a Hermitian rho, q_7 and q_8 are real and the pairs
/// (q_1, q_2), (q_3, q_4), (q_5, q_6) are complex conjugates.
struct BlochVector {
  std::array<Complex, 8> components{};

  /// 1-based access matching the conventional numbering q_1..q_8.
  Complex& operator()(int k) { return components.at(static_cast<std::size_t>(k - 1)); }
  const Complex& operator()(int k) const { return components.at(static_cast<std::size_t>(k - 1)); }
};

/// Gell-Mann matrices lambda_1..lambda_8 and the ladder combinations
/// P_1..P_8 = (T+, T-, V+, V-, U+, U-, V3, U3).
struct BasisMatrices {
  std::array<Matrix3c, 8> gell_mann;
  std::array<Matrix3c, 8> ladder;
};

const BasisMatrices& gellmann_basis();

/// Componentwise inverse of the Bloch layout. Rejects input that is not
/// Hermitian to 1e-12 or not unit trace to 1e-12.
BlochVector to_bloch(const DensityMatrix& rho);

/// rho = (1/3)(I + sum q_k P_k). Never rejects; the result may be unphysical.
DensityMatrix from_bloch(const BlochVector& q);

}  // namespace coherence
