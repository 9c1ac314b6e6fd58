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

#include "coherence/neardegen.hpp"

#include <cmath>

#include "coherence/diagnostics.hpp"
#include "coherence/errors.hpp"
#include "coherence/ode.hpp"

namespace coherence {

namespace {

constexpr Complex kI{0.0, 1.0};

numerics::RealVector pack(const Eigen::Vector4cd& v) {
  numerics::RealVector y(8);
  for (int k = 0; k < 4; ++k) {
    y(2 * k) = v(k).real();
    y(2 * k + 1) = v(k).imag();
  }
  return y;
}

Eigen::Vector4cd unpack(const numerics::RealVector& y) {
  Eigen::Vector4cd v;
  for (int k = 0; k < 4; ++k) v(k) = {y(2 * k), y(2 * k + 1)};
  return v;
}

// Excited level i in {1, 2} -> basis index.
int excited_index(int i) { return i == 1 ? index_of(Level::one) : index_of(Level::two); }

Matrix3c raising(int i) {
  Matrix3c m = Matrix3c::Zero();
  m(excited_index(i), index_of(Level::ground)) = 1.0;
  return m;
}

Matrix3c standard_d(const Matrix3c& a, const Matrix3c& b, const Matrix3c& rho) {
  const Matrix3c ba = b * a;
  return a * rho * b - 0.5 * (ba * rho + rho * ba);
}

Matrix3c nonsecular_q(const Matrix3c& a, const Matrix3c& b, const Matrix3c& rho) {
  return a * rho * b - b * a * rho;
}

Matrix3c nonsecular_p(const Matrix3c& a, const Matrix3c& b, const Matrix3c& rho) {
  return a * rho * b - rho * b * a;
}

void check_window(const NearDegenerateSystem& sys, double t) {
  if (t * sys.delta() > 0.3 || (t > 0.0 && t < sys.tau_s())) {
    diagnostics::emit(diagnostics::Severity::warn, "neardegen.validity_window",
                      {{"t", t},
                       {"delta", sys.delta()},
                       {"tau_s", sys.tau_s()},
                       {"t_delta", t * sys.delta()}});
  }
}

numerics::OdeRhs dressed_system(const DressedGenerator& g) {
  return [g](const numerics::RealVector& y, numerics::RealVector& dydt, double) {
    dydt = pack(g.m * unpack(y) - g.b.cast<Complex>());
  };
}

numerics::OdeConfig ode_config(const EvolveOptions& opts) {
  numerics::OdeConfig cfg;
  cfg.abs_tol = opts.abs_tol;
  cfg.rel_tol = opts.rel_tol;
  cfg.method = opts.method;
  cfg.fixed_step = opts.fixed_step;
  return cfg;
}

}  // namespace

NearDegenerateSystem::NearDegenerateSystem(double omega1_, double omega2_,
                                           double max_relative_splitting)
    : omega1(omega1_), omega2(omega2_) {
  if (!(omega1 > 0.0) || !std::isfinite(omega1) || !std::isfinite(omega2)) {
    throw InvalidArgument("NearDegenerateSystem: omega1 must be positive and finite");
  }
  if (omega2 < omega1) throw InvalidArgument("NearDegenerateSystem: requires omega2 >= omega1");
  if (!(delta() / omega1 < max_relative_splitting)) {
    throw InvalidArgument("NearDegenerateSystem: splitting delta/omega1 = " +
                          std::to_string(delta() / omega1) + " is not small");
  }
}

DressedCoherenceVector DressedCoherenceVector::from_coherence(const CoherenceVector& v) {
  DressedCoherenceVector out;
  out.pi << v.rho22, v.rho00, v.rho_plus, Complex(0.0, v.rho_minus_im);
  return out;
}

DressedCoherenceVector DressedCoherenceVector::from_interaction(const DensityMatrix& rho,
                                                                double delta, double t) {
  const Matrix3c& m = rho.matrix();
  const Complex r21 = std::exp(-kI * delta * t) * m(0, 1);
  const Complex r12 = std::exp(kI * delta * t) * m(1, 0);
  DressedCoherenceVector out;
  out.pi << m(0, 0), m(2, 2), 0.5 * (r21 + r12), 0.5 * (r21 - r12);
  return out;
}

DensityMatrix DressedCoherenceVector::to_interaction(double delta, double t) const {
  Matrix3c m = Matrix3c::Zero();
  m(0, 0) = pi(0);
  m(2, 2) = pi(1);
  m(1, 1) = 1.0 - pi(0) - pi(1);
  m(0, 1) = std::exp(kI * delta * t) * (pi(2) + pi(3));
  m(1, 0) = std::exp(-kI * delta * t) * (pi(2) - pi(3));
  return DensityMatrix(m);
}

CoherenceVector DressedCoherenceVector::to_coherence() const {
  return {pi(0).real(), pi(1).real(), pi(2).real(), pi(3).imag()};
}

DressedGenerator neardegenerate_generator(const NearDegenerateSystem& sys, const BathSpec& bath) {
  const auto [gp1, gm1] = rates_at(bath, sys.omega1);
  const auto [gp2, gm2] = rates_at(bath, sys.omega2);
  const double p = bath.alignment();
  const Complex id = kI * sys.delta();
  const double gsum = 0.5 * (gp1 + gp2);
  // Grouped so that delta = 0 reproduces the degenerate generator bit for bit.
  const double gm_sum = gm1 + gm2;
  DressedGenerator g;
  // clang-format off
  g.m << -gp2,              gm2,                         -p * gp1,         0.0,
         gp2 - gp1,         -(gp1 + gm_sum),              p * (gp1 + gp2), 0.0,
         0.5 * p * (gp1 - gp2), 0.5 * p * (gp1 + gm_sum),     -gsum,        -id,
         0.0,               0.0,                         -id,              -gsum;
  // clang-format on
  g.b << 0.0, -gp1, 0.5 * p * gp1, 0.0;
  return g;
}

DressedTrajectory evolve_neardegenerate_trajectory(const DressedCoherenceVector& pi0,
                                                   const NearDegenerateSystem& sys,
                                                   const BathSpec& bath,
                                                   std::span<const double> times,
                                                   const EvolveOptions& opts) {
  DressedTrajectory out;
  if (times.empty()) return out;
  if (!(times.front() >= 0.0)) throw InvalidArgument("evolve_neardegenerate: times must be >= 0");
  check_window(sys, times.back());
  const auto sol = numerics::integrate_ode(dressed_system(neardegenerate_generator(sys, bath)),
                                           pack(pi0.pi), 0.0, times.back(), times,
                                           ode_config(opts));
  out.times = sol.times;
  for (const auto& y : sol.states) out.states.push_back({unpack(y)});
  return out;
}

DressedCoherenceVector evolve_neardegenerate(const DressedCoherenceVector& pi0,
                                             const NearDegenerateSystem& sys, const BathSpec& bath,
                                             double t, const EvolveOptions& opts) {
  if (!(t >= 0.0) || !std::isfinite(t)) {
    throw InvalidArgument("evolve_neardegenerate: t must be finite and >= 0");
  }
  check_window(sys, t);
  if (t == 0.0) return pi0;
  const auto sol = numerics::integrate_ode(dressed_system(neardegenerate_generator(sys, bath)),
                                           pack(pi0.pi), 0.0, t, {}, ode_config(opts));
  return {unpack(sol.final_state)};
}

PerturbationCoefficients perturbation_coefficients(const CoherenceVector& init,
                                                   const NearDegenerateSystem& sys,
                                                   const BathSpec& bath) {
  const RatePair prime = rate_derivative(bath, sys.omega1, sys.delta());
  PerturbationCoefficients k;
  k.gamma = rates_at(bath, sys.omega1).gamma_plus;
  if (!(k.gamma > 0.0)) throw InvalidArgument("perturbation_coefficients: needs gamma_+ > 0");
  k.x = std::exp(-bath.beta() * sys.omega1);
  k.gamma_plus_prime = prime.gamma_plus;
  k.gamma_minus_prime = prime.gamma_minus;

  const double a = init.rho22;
  const double b = init.rho00;
  const double c = init.rho_plus;
  const double x = k.x;
  const double g = k.gamma;
  const double gpp = k.gamma_plus_prime;
  const double gmp = k.gamma_minus_prime;
  k.a1 = (2.0 * gmp * (1.0 + b + 2.0 * c) - gpp * (1.0 + 2.0 * x - b - 2.0 * c)) /
         (4.0 * g * (1.0 + x));
  k.a2 = gpp * (1.0 - 2.0 * a - b) / (2.0 * g);
  k.a3 = (2.0 * gmp + gpp) / g * ((1.0 + 2.0 * x) * b - 1.0 - 2.0 * c) / (4.0 * (1.0 + x));
  k.b1 = (x * gpp - gmp) * (1.0 + b + 2.0 * c) / (2.0 * g * (1.0 + x));
  k.b2 = gpp * (2.0 * a + b - 1.0) / (2.0 * g);
  k.b3 = (gpp + gmp) * (1.0 + 2.0 * c - (1.0 + 2.0 * x) * b) / (2.0 * g * (1.0 + x));
  return k;
}

Eigen::Vector4cd first_order_correction(const CoherenceVector& init,
                                        const NearDegenerateSystem& sys, const BathSpec& bath,
                                        double t) {
  if (bath.alignment() != 1.0) {
    throw InvalidArgument("first_order_correction: requires aligned dipoles (p = 1)");
  }
  if (!(t >= 0.0)) throw InvalidArgument("first_order_correction: t must be >= 0");
  if (sys.delta() == 0.0) return Eigen::Vector4cd::Zero();

  const PerturbationCoefficients k = perturbation_coefficients(init, sys, bath);
  const double b = init.rho00;
  const double c = init.rho_plus;
  const double d = init.rho_minus_im;
  const double x = k.x;
  const double g = k.gamma;
  const double gt = g * t;
  const double e1 = std::exp(-gt);
  const double e2 = std::exp(-2.0 * (1.0 + x) * gt);
  const double u = 1.0 + x;   // recurring denominators
  const double v = 1.0 + 2.0 * x;

  const double r22 =
      e2 * (k.b1 / (4.0 * u) + (k.b2 - k.b3 - 2.0 * k.a3) / (2.0 * v) - 0.5 * k.b3 * gt -
            d / (2.0 * u * v * g)) +
      k.a1 +
      e1 * ((2.0 * k.a3 - k.b2 + k.b3 + 2.0 * d / g) / (2.0 * v) + (k.b2 * gt - k.b1) / 2.0 +
            k.a2 * gt - k.a1) +
      (k.b1 * g * v - 2.0 * d) / (4.0 * u * g);
  const double r00 =
      e2 * (d / (u * v * g) - k.b1 / (2.0 * u) - k.b2 / v + k.b3 * gt) +
      e1 * (k.b2 * g - 2.0 * d) / (v * g) + (k.b1 * g + 2.0 * d) / (2.0 * u * g);
  const double rp =
      e2 * (k.b1 / (4.0 * u) + k.b2 / (2.0 * v) - 0.5 * k.b3 * gt - d / (2.0 * u * v * g)) -
      e1 * (k.b2 * g + 4.0 * x * d) / (2.0 * v * g) + v * d / (2.0 * u * g) - k.b1 / (4.0 * u);
  // The imaginary part of rho- follows from the fourth row directly.
  const double big_a = (v * (b + 2.0 * c) - 1.0) / (4.0 * u);
  const double big_b = (1.0 + 2.0 * c - v * b) / (4.0 * u);
  const double rm = e1 * (big_a / g - 0.5 * k.gamma_plus_prime * d * t) - big_a / g -
                    big_b * (e1 - e2) / (v * g);

  Eigen::Vector4cd out;
  out << r22, r00, rp, Complex(0.0, rm);
  return out;
}

DressedCoherenceVector perturbative_solution(const CoherenceVector& init,
                                             const NearDegenerateSystem& sys,
                                             const BathSpec& bath, double t) {
  const CoherenceVector zeroth =
      analytic_evolution_aligned(init, sys.degenerate_limit(), bath, t);
  DressedCoherenceVector out = DressedCoherenceVector::from_coherence(zeroth);
  out.pi += sys.delta() * first_order_correction(init, sys, bath, t);
  return out;
}

DensityMatrix thermalize_independent(const DensityMatrix& /*rho*/, const NearDegenerateSystem& sys,
                                     const BathSpec& bath) {
  // Weights relative to the ground state keep beta * omega ~ 700 finite.
  const double w2 = std::exp(-bath.beta() * sys.omega2);
  const double w1 = std::exp(-bath.beta() * sys.omega1);
  const double z = 1.0 + w1 + w2;
  return DensityMatrix::diagonal(w2 / z, w1 / z, 1.0 / z);
}

Matrix3c nonsecular_dissipator(const Matrix3c& rho, const NearDegenerateSystem& sys,
                               const BathSpec& bath, double t) {
  const RatePair r[3] = {{}, rates_at(bath, sys.omega1), rates_at(bath, sys.omega2)};
  const double p = bath.alignment();
  const double delta = sys.delta();
  Matrix3c out = secular_dissipator(rho, sys, bath);
  for (int k = 1; k <= 2; ++k) {
    const int kp = 3 - k;
    const Matrix3c up_k = raising(k);
    const Matrix3c up_kp = raising(kp);
    const Matrix3c down_k = up_k.adjoint();
    const Matrix3c down_kp = up_kp.adjoint();
    const double s = static_cast<double>(kp - k) * delta * t;
    // Emission (+) channel: Q(sigma-^(k), sigma+^(k')) and P(sigma-^(k'), sigma+^(k)).
    out += 0.5 * p * r[k].gamma_plus *
           (std::exp(kI * s) * nonsecular_q(down_k, up_kp, rho) +
            std::exp(-kI * s) * nonsecular_p(down_kp, up_k, rho));
    // Absorption (-) channel with conjugate phases.
    out += 0.5 * p * r[k].gamma_minus *
           (std::exp(-kI * s) * nonsecular_q(up_k, down_kp, rho) +
            std::exp(kI * s) * nonsecular_p(up_kp, down_k, rho));
  }
  return out;
}

Matrix3c secular_dissipator(const Matrix3c& rho, const NearDegenerateSystem& sys,
                            const BathSpec& bath) {
  Matrix3c out = Matrix3c::Zero();
  for (int i = 1; i <= 2; ++i) {
    const RatePair r = rates_at(bath, i == 1 ? sys.omega1 : sys.omega2);
    const Matrix3c up = raising(i);
    const Matrix3c down = up.adjoint();
    out += r.gamma_plus * standard_d(down, up, rho) + r.gamma_minus * standard_d(up, down, rho);
  }
  return out;
}

}  // namespace coherence
