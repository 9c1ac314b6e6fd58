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
#include "coherence/ode.hpp"

namespace coherence {

/// Degenerate V system: both excited levels at energy omega above the ground.
struct DegenerateSystem {
  explicit DegenerateSystem(double omega);
  double omega;
};

/// Pi = (rho22, rho00, rho+, rho-) with rho+- = (rho21 +- rho12)/2. For a
/// Hermitian state rho+ is real and rho- = i d is imaginary; only d is stored.
///
/// The same four numbers (a, b, c, d) double as the initial condition of the
/// closed-form aligned solution.
struct CoherenceVector {
  double rho22 = 0.0;
  double rho00 = 1.0;
  double rho_plus = 0.0;
  double rho_minus_im = 0.0;

  static CoherenceVector from_density(const DensityMatrix& rho);
  static CoherenceVector from_vector(const Eigen::Vector4d& v);

  double rho11() const { return 1.0 - rho22 - rho00; }
  Complex rho21() const { return {rho_plus, rho_minus_im}; }
  Complex rho12() const { return {rho_plus, -rho_minus_im}; }
  Eigen::Vector4d as_vector() const { return {rho22, rho00, rho_plus, rho_minus_im}; }

  /// The excited-coherence state; ground-excited coherences are zero.
  DensityMatrix to_density() const;
};

/// dPi/dt = m Pi - b.
///
/// Sign convention: with this form every eigenvalue of m has a non-positive
/// real part (strictly negative for |p| < 1), so Pi relaxes to m^{-1} b. This
/// was fixed by requiring the stationary point to be the Gibbs state and by
/// reproducing the closed-form aligned solution; a statement that the real
/// parts are "positive" only holds for the opposite sign of the generator.
struct GeneratorMatrix {
  Eigen::Matrix4d m;
  Eigen::Vector4d b;
};

GeneratorMatrix coherence_generator(const DegenerateSystem& sys, const BathSpec& bath);

/// dq/dt for the generalized Bloch vector. Three decoupled blocks:
/// {q1, q2, q7, q8} (excited populations and coherence), {q3, q5} and
/// {q4, q6} (ground-excited coherences, rotating at -+omega and decaying).
BlochVector bloch_rhs(const BlochVector& q, const DegenerateSystem& sys, const BathSpec& bath);

/// Operator-form right-hand side -i[H, rho] + L[rho] with H = omega (|1><1| + |2><2|),
/// the Lamb shift set to zero. Independent of bloch_rhs; used to cross-check it.
Matrix3c gksl_rhs(const Matrix3c& rho, const DegenerateSystem& sys, const BathSpec& bath);

struct EvolveOptions {
  double abs_tol = 1e-10;
  double rel_tol = 1e-10;
  numerics::OdeMethod method = numerics::OdeMethod::dopri5;
  double fixed_step = 1e-3;
};

struct Trajectory {
  std::vector<double> times;
  std::vector<DensityMatrix> states;
  long steps = 0;
};

/// Integrates the Bloch equations from rho0 for a time t >= 0.
DensityMatrix evolve(const DensityMatrix& rho0, const DegenerateSystem& sys, const BathSpec& bath,
                     double t, const EvolveOptions& opts = {});

/// States at the requested (sorted, non-negative) times, from one integration.
Trajectory evolve_trajectory(const DensityMatrix& rho0, const DegenerateSystem& sys,
                             const BathSpec& bath, std::span<const double> times,
                             const EvolveOptions& opts = {});

/// evolve() for many initial states, spread over `jobs` threads (0 = hardware
/// concurrency). Output order matches input order; results do not depend on jobs.
std::vector<DensityMatrix> evolve_batch(std::span<const DensityMatrix> initial,
                                        const DegenerateSystem& sys, const BathSpec& bath,
                                        double t, const EvolveOptions& opts = {},
                                        unsigned jobs = 0);

/// Closed-form solution for perfectly aligned dipoles (p = 1). `init` holds
/// (a, b, c, d) = (rho22, rho00, rho+, Im rho-) at t = 0. Rejects p != 1.
CoherenceVector analytic_evolution_aligned(const CoherenceVector& init, const DegenerateSystem& sys,
                                           const BathSpec& bath, double t);

/// Long-time limit from `init`. For |p| < 1 this is the Gibbs state, found by
/// solving m Pi = b; when m is too ill-conditioned (cond > 1e12, including
/// |p| = 1) the closed-form aligned limit is used, with p = -1 handled by the
/// unitary diag(1, -1, 1), which flips the sign of the excited coherence.
DensityMatrix steady_state(const DegenerateSystem& sys, const BathSpec& bath,
                           const CoherenceVector& init);

}  // namespace coherence
