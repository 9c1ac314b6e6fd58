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

#include "coherence/dynamics.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <thread>

#include "coherence/errors.hpp"

namespace coherence {

namespace {

constexpr Complex kI{0.0, 1.0};

numerics::RealVector pack(const BlochVector& q) {
  numerics::RealVector y(16);
  for (int k = 0; k < 8; ++k) {
    y(2 * k) = q.components[k].real();
    y(2 * k + 1) = q.components[k].imag();
  }
  return y;
}

BlochVector unpack(const numerics::RealVector& y) {
  BlochVector q;
  for (int k = 0; k < 8; ++k) q.components[k] = {y(2 * k), y(2 * k + 1)};
  return q;
}

numerics::OdeConfig ode_config(const EvolveOptions& opts) {
  numerics::OdeConfig cfg;
  cfg.abs_tol = opts.abs_tol;
  cfg.rel_tol = opts.rel_tol;
  cfg.method = opts.method;
  cfg.fixed_step = opts.fixed_step;
  return cfg;
}

numerics::OdeRhs bloch_system(const DegenerateSystem& sys, const BathSpec& bath) {
  return [sys, bath](const numerics::RealVector& y, numerics::RealVector& dydt, double) {
    dydt = pack(bloch_rhs(unpack(y), sys, bath));
  };
}

}  // namespace

DegenerateSystem::DegenerateSystem(double omega_) : omega(omega_) {
  if (!(omega > 0.0) || !std::isfinite(omega)) {
    throw InvalidArgument("DegenerateSystem: omega must be positive and finite");
  }
}

CoherenceVector CoherenceVector::from_density(const DensityMatrix& rho) {
  const Matrix3c& m = rho.matrix();
  const Complex plus = 0.5 * (m(0, 1) + m(1, 0));
  const Complex minus = 0.5 * (m(0, 1) - m(1, 0));
  return {m(0, 0).real(), m(2, 2).real(), plus.real(), minus.imag()};
}

CoherenceVector CoherenceVector::from_vector(const Eigen::Vector4d& v) {
  return {v(0), v(1), v(2), v(3)};
}

DensityMatrix CoherenceVector::to_density() const {
  Matrix3c m = Matrix3c::Zero();
  m(0, 0) = rho22;
  m(1, 1) = rho11();
  m(2, 2) = rho00;
  m(0, 1) = rho21();
  m(1, 0) = rho12();
  return DensityMatrix(m);
}

GeneratorMatrix coherence_generator(const DegenerateSystem& sys, const BathSpec& bath) {
  const auto [gp, gm] = rates_at(bath, sys.omega);
  const double p = bath.alignment();
  GeneratorMatrix g;
  // clang-format off
  g.m << -gp,  gm,                          -p * gp, 0.0,
         0.0, -(gp + 2.0 * gm),              2.0 * p * gp, 0.0,
         0.0,  0.5 * p * (gp + 2.0 * gm),   -gp, 0.0,
         0.0,  0.0,                          0.0, -gp;
  // clang-format on
  g.b << 0.0, -gp, 0.5 * p * gp, 0.0;
  return g;
}

BlochVector bloch_rhs(const BlochVector& q, const DegenerateSystem& sys, const BathSpec& bath) {
  const auto [gp, gm] = rates_at(bath, sys.omega);
  const double p = bath.alignment();
  const double w = sys.omega;
  const Complex s78 = q(7) + q(8);
  const Complex s12 = q(1) + q(2);
  BlochVector dq;
  dq(1) = gm * p * (1.0 - s78) - gp * (q(1) + p * (1.0 + 0.5 * s78));
  dq(2) = gm * p * (1.0 - s78) - gp * (q(2) + p * (1.0 + 0.5 * s78));
  dq(7) = gm * (1.0 - s78) - gp * (1.0 + q(7) + 0.5 * p * s12);
  dq(8) = gm * (1.0 - s78) - gp * (1.0 + q(8) + 0.5 * p * s12);
  dq(3) = -kI * w * q(3) - 0.5 * gp * (q(3) + p * q(5)) - gm * q(3);
  dq(5) = -kI * w * q(5) - 0.5 * gp * (q(5) + p * q(3)) - gm * q(5);
  dq(4) = kI * w * q(4) - 0.5 * gp * (q(4) + p * q(6)) - gm * q(4);
  dq(6) = kI * w * q(6) - 0.5 * gp * (q(6) + p * q(4)) - gm * q(6);
  return dq;
}

Matrix3c gksl_rhs(const Matrix3c& rho, const DegenerateSystem& sys, const BathSpec& bath) {
  const CrossRates rates = cross_rates(bath, sys.omega);
  const int g = index_of(Level::ground);
  const int excited[2] = {index_of(Level::one), index_of(Level::two)};
  // raise[i] = |i><0| for excited level i; lower[i] = its adjoint.
  Matrix3c raise[2];
  for (int i = 0; i < 2; ++i) {
    raise[i].setZero();
    raise[i](excited[i], g) = 1.0;
  }
  Matrix3c h = Matrix3c::Zero();
  h(0, 0) = sys.omega;
  h(1, 1) = sys.omega;
  Matrix3c out = -kI * (h * rho - rho * h);
  for (int i = 0; i < 2; ++i) {
    for (int j = 0; j < 2; ++j) {
      const Matrix3c lower_i = raise[i].adjoint();
      const Matrix3c lower_j = raise[j].adjoint();
      const Matrix3c em = raise[j] * lower_i;  // sigma+^(j) sigma-^(i)
      const Matrix3c ab = lower_j * raise[i];  // sigma-^(j) sigma+^(i)
      out += rates.emission(i, j) * (lower_i * rho * raise[j] - 0.5 * (em * rho + rho * em));
      out += rates.absorption(i, j) * (raise[i] * rho * lower_j - 0.5 * (ab * rho + rho * ab));
    }
  }
  return out;
}

DensityMatrix evolve(const DensityMatrix& rho0, const DegenerateSystem& sys, const BathSpec& bath,
                     double t, const EvolveOptions& opts) {
  if (!(t >= 0.0) || !std::isfinite(t)) throw InvalidArgument("evolve: t must be finite and >= 0");
  if (t == 0.0) return rho0;
  const auto sol = numerics::integrate_ode(bloch_system(sys, bath), pack(to_bloch(rho0)), 0.0, t,
                                           {}, ode_config(opts));
  return from_bloch(unpack(sol.final_state));
}

Trajectory evolve_trajectory(const DensityMatrix& rho0, const DegenerateSystem& sys,
                             const BathSpec& bath, std::span<const double> times,
                             const EvolveOptions& opts) {
  Trajectory out;
  if (times.empty()) return out;
  if (!(times.front() >= 0.0)) throw InvalidArgument("evolve_trajectory: times must be >= 0");
  const auto sol = numerics::integrate_ode(bloch_system(sys, bath), pack(to_bloch(rho0)), 0.0,
                                           times.back(), times, ode_config(opts));
  out.times = sol.times;
  out.steps = sol.steps;
  out.states.reserve(sol.states.size());
  for (const auto& y : sol.states) out.states.push_back(from_bloch(unpack(y)));
  return out;
}

std::vector<DensityMatrix> evolve_batch(std::span<const DensityMatrix> initial,
                                        const DegenerateSystem& sys, const BathSpec& bath,
                                        double t, const EvolveOptions& opts, unsigned jobs) {
  std::vector<DensityMatrix> out(initial.size());
  std::vector<std::exception_ptr> errors(initial.size());
  if (jobs == 0) jobs = std::max(1u, std::thread::hardware_concurrency());
  jobs = std::min<unsigned>(jobs, static_cast<unsigned>(std::max<std::size_t>(1, initial.size())));
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < initial.size(); i = next++) {
      try {
        out[i] = evolve(initial[i], sys, bath, t, opts);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  std::vector<std::thread> pool;
  for (unsigned k = 1; k < jobs; ++k) pool.emplace_back(worker);
  worker();
  for (auto& th : pool) th.join();
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return out;
}

CoherenceVector analytic_evolution_aligned(const CoherenceVector& init, const DegenerateSystem& sys,
                                           const BathSpec& bath, double t) {
  if (bath.alignment() != 1.0) {
    throw InvalidArgument("analytic_evolution_aligned: requires aligned dipoles (p = 1)");
  }
  if (!(t >= 0.0)) throw InvalidArgument("analytic_evolution_aligned: t must be >= 0");
  const auto [gp, gm] = rates_at(bath, sys.omega);
  const double x = std::exp(-bath.beta() * sys.omega);
  const double a = init.rho22;
  const double b = init.rho00;
  const double c = init.rho_plus;
  const double d = init.rho_minus_im;
  const double e1 = std::exp(-gp * t);
  const double e2 = std::exp(-2.0 * (1.0 + x) * gp * t);
  const double k = 1.0 + 2.0 * c - (1.0 + 2.0 * x) * b;
  CoherenceVector out;
  out.rho22 = ((1.0 + 2.0 * x - b - 2.0 * c) + 2.0 * (1.0 + x) * (2.0 * a + b - 1.0) * e1 + k * e2) /
              (4.0 * (1.0 + x));
  out.rho00 = ((1.0 + b + 2.0 * c) - k * e2) / (2.0 * (1.0 + x));
  out.rho_plus = (-1.0 + (1.0 + 2.0 * x) * (b + 2.0 * c) + k * e2) / (4.0 * (1.0 + x));
  out.rho_minus_im = d * e1;
  return out;
}

DensityMatrix steady_state(const DegenerateSystem& sys, const BathSpec& bath,
                           const CoherenceVector& init) {
  const GeneratorMatrix g = coherence_generator(sys, bath);
  if (g.m.isZero(0.0)) return init.to_density();  // no coupling to the bath

  const Eigen::JacobiSVD<Eigen::Matrix4d> svd(g.m);
  const auto& sv = svd.singularValues();
  const double cond = sv(3) > 0.0 ? sv(0) / sv(3) : std::numeric_limits<double>::infinity();
  if (cond <= 1e12) {
    const Eigen::Vector4d pi = g.m.colPivHouseholderQr().solve(g.b);
    return CoherenceVector::from_vector(pi).to_density();
  }

  // Aligned (or anti-aligned) limit: rho00 + 2 sign(p) rho+ is conserved.
  const double sign = bath.alignment() < 0.0 ? -1.0 : 1.0;
  const double x = std::exp(-bath.beta() * sys.omega);
  const double b = init.rho00;
  const double c = sign * init.rho_plus;
  CoherenceVector out;
  out.rho22 = (1.0 + 2.0 * x - b - 2.0 * c) / (4.0 * (1.0 + x));
  out.rho00 = (1.0 + b + 2.0 * c) / (2.0 * (1.0 + x));
  out.rho_plus = sign * (-1.0 + (1.0 + 2.0 * x) * (b + 2.0 * c)) / (4.0 * (1.0 + x));
  out.rho_minus_im = 0.0;
  return out.to_density();
}

}  // namespace coherence
