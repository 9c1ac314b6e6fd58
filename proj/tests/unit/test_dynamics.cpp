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


#include <doctest.h>

#include <cmath>
#include <vector>

#include "coherence/dynamics.hpp"
#include "coherence/errors.hpp"
#include "coherence/thermo.hpp"
#include "support/oracles.hpp"

using namespace coherence;

namespace {

BathSpec bath_of(double beta, double p, double gamma = 1.0) {
  return BathSpec(beta, RateProfile::constant(gamma), p);
}

double max_diff(const DensityMatrix& a, const Matrix3c& b) { return oracle::max_abs(a.matrix() - b); }

}  // namespace

TEST_SUITE("dynamics") {

TEST_CASE("generator entries") {
  const DegenerateSystem sys(1.0);
  const auto g0 = coherence_generator(sys, bath_of(1.0, 0.0));
  CHECK(g0.m(0, 2) == 0.0);
  CHECK(g0.m(2, 1) == 0.0);
  const auto g1 = coherence_generator(sys, bath_of(1.0, 1.0));
  CHECK(std::abs(g1.m.determinant()) < 1e-14);
  for (double p : {-0.7, 0.0, 0.4, 1.0}) {
    CHECK(coherence_generator(sys, bath_of(0.8, p, 2.5)).m(3, 3) == -2.5);
  }
}

TEST_CASE("property: decay for |p| < 1, a zero mode for |p| = 1") {
  for (double beta : {0.1, 1.0, 4.0}) {
    for (double p : {-0.99, -0.5, 0.0, 0.3, 0.9, 0.999}) {
      const auto g = coherence_generator(DegenerateSystem(1.3), bath_of(beta, p));
      const Eigen::Vector4cd ev = g.m.eigenvalues();
      for (int k = 0; k < 4; ++k) CHECK(ev(k).real() < 0.0);
      CHECK(std::abs(g.m.determinant()) > 0.0);
    }
    for (double p : {-1.0, 1.0}) {
      const auto g = coherence_generator(DegenerateSystem(1.3), bath_of(beta, p));
      Eigen::FullPivLU<Eigen::Matrix4d> lu(g.m);
      CHECK(lu.rank() < 4);
    }
  }
}

TEST_CASE("sign self-consistency: the fixed point of m Pi = b is the Gibbs state") {
  for (double beta : {0.2, 1.0, 3.0}) {
    for (double p : {-0.6, 0.0, 0.5, 0.95}) {
      const DegenerateSystem sys(0.9);
      const auto g = coherence_generator(sys, bath_of(beta, p));
      const Eigen::Vector4d pi = g.m.fullPivLu().solve(g.b);
      const double x = std::exp(-beta * sys.omega);
      CHECK(pi(0) == doctest::Approx(x / (1.0 + 2.0 * x)).epsilon(1e-13));
      CHECK(pi(1) == doctest::Approx(1.0 / (1.0 + 2.0 * x)).epsilon(1e-13));
      CHECK(std::abs(pi(2)) < 1e-13);
      CHECK(std::abs(pi(3)) < 1e-13);
    }
  }
}

TEST_CASE("the aligned closed form solves dPi/dt = m Pi - b") {
  const DegenerateSystem sys(1.0);
  const BathSpec bath = bath_of(1.0, 1.0);
  const auto g = coherence_generator(sys, bath);
  const CoherenceVector init{0.2, 0.5, 0.1, -0.05};
  for (double t : {0.3, 1.0, 4.0}) {
    const double h = 1e-5;
    const Eigen::Vector4d fwd = analytic_evolution_aligned(init, sys, bath, t + h).as_vector();
    const Eigen::Vector4d bwd = analytic_evolution_aligned(init, sys, bath, t - h).as_vector();
    const Eigen::Vector4d now = analytic_evolution_aligned(init, sys, bath, t).as_vector();
    const Eigen::Vector4d lhs = (fwd - bwd) / (2 * h);
    CHECK((lhs - (g.m * now - g.b)).cwiseAbs().maxCoeff() < 1e-9);
  }
}

TEST_CASE("bloch rhs: Gibbs state is stationary for p = 0") {
  const DegenerateSystem sys(1.0);
  const BathSpec bath = bath_of(1.0, 0.0);
  const BlochVector q = to_bloch(gibbs(HamiltonianSpec::degenerate(1.0), 1.0));
  const BlochVector dq = bloch_rhs(q, sys, bath);
  for (int k = 1; k <= 8; ++k) CHECK(std::abs(dq(k)) < 1e-12);
}

TEST_CASE("bloch rhs: outer coherence q3 rotates and decays") {
  const DegenerateSystem sys(1.7);
  const BathSpec bath = bath_of(1.0, 0.0, 1.2);
  BlochVector q;
  q(3) = 1.0;
  const auto [gp, gm] = rates_at(bath, sys.omega);
  const Complex expect = Complex(-0.5 * gp - gm, -sys.omega);
  CHECK(std::abs(bloch_rhs(q, sys, bath)(3) - expect) < 1e-15);
  CHECK(std::abs(bloch_rhs(q, sys, bath)(5)) < 1e-15);
}

TEST_CASE("bloch rhs: ground state pumps q7 at rate 3 gamma_-") {
  // rho22 = (1 + q7)/3 and d rho22/dt = gamma_- rho00 for the ground state.
  const DegenerateSystem sys(1.0);
  const BathSpec bath = bath_of(1.0, 1.0);
  const BlochVector dq = bloch_rhs(to_bloch(DensityMatrix::ground()), sys, bath);
  CHECK(dq(7).real() == doctest::Approx(3.0 * std::exp(-1.0)).epsilon(1e-15));
}

TEST_CASE("property: bloch rhs, operator form and an independent Liouvillian agree") {
  oracle::StateSampler s(31);
  for (double p : {-1.0, -0.3, 0.0, 0.6, 1.0}) {
    const DegenerateSystem sys(1.4);
    const BathSpec bath = bath_of(0.7, p, 0.8);
    const oracle::Mat9 l = oracle::liouvillian(1.4, 0.7, 0.8, p);
    for (int n = 0; n < 20; ++n) {
      const Matrix3c rho = s.any();
      const Matrix3c via_bloch = from_bloch(bloch_rhs(to_bloch(DensityMatrix(rho)), sys, bath)).matrix() -
                                 Matrix3c::Identity() / 3.0;
      const Matrix3c via_gksl = gksl_rhs(rho, sys, bath);
      const Matrix3c via_oracle = oracle::unvec(l * oracle::vec(rho));
      CHECK(oracle::max_abs(via_gksl - via_oracle) < 1e-14);
      CHECK(oracle::max_abs(via_bloch - via_oracle) < 1e-14);
    }
  }
}

TEST_CASE("evolve: t = 0 returns the input; negative t is rejected") {
  oracle::StateSampler s(3);
  const DensityMatrix rho(s.any());
  CHECK(evolve(rho, DegenerateSystem(1.0), bath_of(1.0, 1.0), 0.0).matrix() == rho.matrix());
  CHECK_THROWS_AS(evolve(rho, DegenerateSystem(1.0), bath_of(1.0, 1.0), -1.0), InvalidArgument);
}

TEST_CASE("evolve: ground state, aligned dipoles, t = 50 matches the closed form") {
  const DegenerateSystem sys(1.0);
  const BathSpec bath = bath_of(1.0, 1.0);
  const DensityMatrix num = evolve(DensityMatrix::ground(), sys, bath, 50.0);
  const DensityMatrix exact = analytic_evolution_aligned(CoherenceVector{}, sys, bath, 50.0).to_density();
  CHECK(max_diff(num, exact.matrix()) < 1e-8);
}

TEST_CASE("evolve: p = 0.5 relaxes to Gibbs by gamma t = 200") {
  const DensityMatrix e = evolve(DensityMatrix::ground(), DegenerateSystem(1.0), bath_of(1.0, 0.5), 200.0);
  CHECK(trace_distance(e, gibbs(HamiltonianSpec::degenerate(1.0), 1.0)) < 1e-8);
}

TEST_CASE("property: evolve agrees with the matrix-exponential oracle") {
  oracle::StateSampler s(808);
  for (double p : {-1.0, -0.4, 0.0, 0.7, 1.0}) {
    const double beta = s.uniform(0.2, 3.0), omega = s.uniform(0.5, 2.0), g = s.uniform(0.5, 2.0);
    const oracle::Mat9 l = oracle::liouvillian(omega, beta, g, p);
    for (int n = 0; n < 5; ++n) {
      const Matrix3c rho0 = s.any();
      const double t = s.uniform(0.1, 20.0);
      const DensityMatrix num = evolve(DensityMatrix(rho0), DegenerateSystem(omega), bath_of(beta, p, g), t);
      CHECK(max_diff(num, oracle::propagate(l, rho0, t)) < 1e-8);
    }
  }
}

TEST_CASE("closed form at t = 0 and t -> infinity") {
  const DegenerateSystem sys(1.0);
  const BathSpec bath = bath_of(1.0, 1.0);
  const CoherenceVector init{0.1, 0.6, 0.05, 0.02};
  const CoherenceVector at0 = analytic_evolution_aligned(init, sys, bath, 0.0);
  CHECK(at0.rho22 == doctest::Approx(0.1));
  CHECK(at0.rho00 == doctest::Approx(0.6));
  CHECK(at0.rho12() == Complex(0.05, -0.02));

  const double x = std::exp(-1.0);
  const CoherenceVector late = analytic_evolution_aligned(CoherenceVector{}, sys, bath, 1e3);
  CHECK(late.rho22 == doctest::Approx(x / (2.0 * (1.0 + x))).epsilon(1e-14));
  CHECK(late.rho22 == doctest::Approx(0.134470).epsilon(1e-6));
  CHECK(late.rho12().real() == doctest::Approx(0.134470).epsilon(1e-6));
  CHECK(max_diff(late.to_density(), steady_state(sys, bath, CoherenceVector{}).matrix()) < 1e-14);

  CHECK_THROWS_AS(analytic_evolution_aligned(init, sys, bath_of(1.0, 0.9), 1.0), InvalidArgument);
}

TEST_CASE("property: 100 random aligned initial states, closed form vs integrator over [0, 50]") {
  oracle::StateSampler s(4242);
  const DegenerateSystem sys(1.0);
  const BathSpec bath = bath_of(1.0, 1.0);
  std::vector<double> times;
  for (int k = 0; k <= 100; ++k) times.push_back(0.5 * k);
  double worst = 0.0;
  for (int n = 0; n < 100; ++n) {
    const DensityMatrix rho0(s.block());
    const CoherenceVector init = CoherenceVector::from_density(rho0);
    const Trajectory tr = evolve_trajectory(rho0, sys, bath, times);
    for (std::size_t k = 0; k < times.size(); ++k) {
      const auto exact = analytic_evolution_aligned(init, sys, bath, times[k]).to_density();
      worst = std::max(worst, max_diff(tr.states[k], exact.matrix()));
    }
  }
  CHECK(worst <= 1e-8);
}

TEST_CASE("steady states") {
  const DensityMatrix g = steady_state(DegenerateSystem(1.0), bath_of(std::log(2.0), 0.3), CoherenceVector{});
  CHECK(max_diff(g, DensityMatrix::diagonal(0.25, 0.25, 0.5).matrix()) < 1e-14);

  const DensityMatrix a = steady_state(DegenerateSystem(1.0), bath_of(1.0, 1.0), CoherenceVector{});
  CHECK(l1_coherence(a) == doctest::Approx(1.0 / (std::exp(1.0) + 1.0)).epsilon(1e-14));
  CHECK(max_diff(evolve(a, DegenerateSystem(1.0), bath_of(1.0, 1.0), 30.0), a.matrix()) < 1e-10);
}

TEST_CASE("property: steady-state coherence formula for aligned dipoles") {
  oracle::StateSampler s(99);
  for (int n = 0; n < 200; ++n) {
    const double beta = s.uniform(0.1, 4.0);
    const DensityMatrix rho0(s.block());
    const CoherenceVector init = CoherenceVector::from_density(rho0);
    const double x = std::exp(-beta);
    const double expect = std::abs((1.0 + 2.0 * x) * (init.rho00 + 2.0 * init.rho_plus) - 1.0) / (2.0 * (1.0 + x));
    CHECK(l1_coherence(steady_state(DegenerateSystem(1.0), bath_of(beta, 1.0), init)) ==
          doctest::Approx(expect).epsilon(1e-12));
  }
}

TEST_CASE("anti-aligned dipoles: steady state matches the matrix-exponential oracle") {
  oracle::StateSampler s(12);
  const BathSpec bath = bath_of(0.9, -1.0);
  const oracle::Mat9 l = oracle::liouvillian(1.0, 0.9, 1.0, -1.0);
  for (int n = 0; n < 10; ++n) {
    const Matrix3c rho0 = s.block();
    const DensityMatrix ss = steady_state(DegenerateSystem(1.0), bath, CoherenceVector::from_density(DensityMatrix(rho0)));
    CHECK(max_diff(ss, oracle::propagate(l, rho0, 80.0)) < 1e-12);
  }
}

TEST_CASE("property: trace and positivity along dense trajectories") {
  oracle::StateSampler s(606);
  std::vector<double> times;
  for (int k = 0; k <= 400; ++k) times.push_back(0.05 * k);
  for (double p : {-1.0, 0.0, 0.5, 0.99, 1.0}) {
    for (int n = 0; n < 5; ++n) {
      const Trajectory tr = evolve_trajectory(DensityMatrix(s.any()), DegenerateSystem(1.0), bath_of(0.5, p), times);
      for (const auto& rho : tr.states) {
        CHECK(std::abs(rho.trace() - Complex(1.0)) < 1e-12);
        CHECK(min_eigenvalue(rho) >= -1e-8);
      }
    }
  }
}

TEST_CASE("property: outer coherences decay monotonically") {
  Matrix3c m = Matrix3c::Zero();
  m(0, 0) = 0.3;
  m(1, 1) = 0.2;
  m(2, 2) = 0.5;
  m(0, 2) = m(2, 0) = 0.2;
  m(1, 2) = Complex(0.1, 0.1);
  m(2, 1) = std::conj(m(1, 2));
  std::vector<double> times;
  for (int k = 0; k <= 400; ++k) times.push_back(0.5 * k);
  // At p = 1 the antisymmetric outer coherence decays only at the absorption rate.
  for (double p : {0.0, 0.8, 1.0}) {
    const Trajectory tr = evolve_trajectory(DensityMatrix(m), DegenerateSystem(2.0), bath_of(1.0, p), times);
    double prev = std::numeric_limits<double>::infinity();
    for (const auto& rho : tr.states) {
      const BlochVector q = to_bloch(rho);
      const double norm = std::norm(q(3)) + std::norm(q(4)) + std::norm(q(5)) + std::norm(q(6));
      CHECK(norm <= prev * (1.0 + 1e-12) + 1e-18);  // integrator noise floor
      prev = norm;
    }
    CHECK(prev < 1e-8);
  }
}

TEST_CASE("batch evolution is independent of the thread count") {
  oracle::StateSampler s(1);
  std::vector<DensityMatrix> inits;
  for (int n = 0; n < 16; ++n) inits.emplace_back(s.any());
  const auto one = evolve_batch(inits, DegenerateSystem(1.0), bath_of(1.0, 0.5), 7.0, {}, 1);
  const auto many = evolve_batch(inits, DegenerateSystem(1.0), bath_of(1.0, 0.5), 7.0, {}, 4);
  for (std::size_t i = 0; i < inits.size(); ++i) {
    CHECK(one[i].matrix() == many[i].matrix());
    CHECK(one[i].matrix() == evolve(inits[i], DegenerateSystem(1.0), bath_of(1.0, 0.5), 7.0).matrix());
  }
}

TEST_CASE("fixed-step fallback agrees with the adaptive integrator") {
  EvolveOptions rk4;
  rk4.method = numerics::OdeMethod::fixed_rk4;
  rk4.fixed_step = 1e-2;
  const auto a = evolve(DensityMatrix::ground(), DegenerateSystem(1.0), bath_of(1.0, 1.0), 5.0);
  const auto b = evolve(DensityMatrix::ground(), DegenerateSystem(1.0), bath_of(1.0, 1.0), 5.0, rk4);
  CHECK(max_diff(a, b.matrix()) < 1e-9);
}

}  // TEST_SUITE
