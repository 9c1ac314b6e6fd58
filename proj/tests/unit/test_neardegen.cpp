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

#include "coherence/diagnostics.hpp"
#include "coherence/errors.hpp"
#include "coherence/neardegen.hpp"
#include "coherence/ode.hpp"
#include "coherence/thermo.hpp"
#include "support/oracles.hpp"

using namespace coherence;

namespace {

BathSpec bath_of(double beta, double p) { return BathSpec(beta, RateProfile::constant(1.0), p); }

const CoherenceVector kInit{0.2, 0.5, 0.15, 0.05};

// Pi_1' = M Pi_1 + M_1 Pi with Pi_1(0) = 0, integrated directly. M_1 is the
// finite-splitting difference quotient of the dressed generator and Pi the
// aligned closed form; both are inputs, the correction itself is not.
Eigen::Vector4cd first_order_oracle(const CoherenceVector& init, double omega1, double delta,
                                    const BathSpec& bath, double t) {
  const NearDegenerateSystem sys(omega1, omega1 + delta);
  const NearDegenerateSystem flat(omega1, omega1);
  const Eigen::Matrix4cd m0 = neardegenerate_generator(flat, bath).m;
  const Eigen::Matrix4cd m1 = (neardegenerate_generator(sys, bath).m - m0) / delta;
  auto rhs = [&](const numerics::RealVector& y, numerics::RealVector& dy, double s) {
    Eigen::Vector4cd p1;
    for (int i = 0; i < 4; ++i) p1(i) = {y(i), y(4 + i)};
    const CoherenceVector base = analytic_evolution_aligned(init, DegenerateSystem(omega1), bath, s);
    const Eigen::Vector4cd pi = DressedCoherenceVector::from_coherence(base).pi;
    const Eigen::Vector4cd d = m0 * p1 + m1 * pi;
    for (int i = 0; i < 4; ++i) { dy(i) = d(i).real(); dy(4 + i) = d(i).imag(); }
  };
  numerics::OdeConfig cfg;
  cfg.abs_tol = cfg.rel_tol = 1e-13;
  const auto sol = numerics::integrate_ode(rhs, numerics::RealVector::Zero(8), 0.0, t, {}, cfg);
  Eigen::Vector4cd out;
  for (int i = 0; i < 4; ++i) out(i) = {sol.final_state(i), sol.final_state(4 + i)};
  return out;
}

}  // namespace

TEST_SUITE("neardegen") {

TEST_CASE("construction rejects bad splittings") {
  CHECK_THROWS_AS(NearDegenerateSystem(0.0, 0.01), InvalidArgument);
  CHECK_THROWS_AS(NearDegenerateSystem(1.0, 0.99), InvalidArgument);
  CHECK_THROWS_AS(NearDegenerateSystem(1.0, 1.2), InvalidArgument);
  CHECK(NearDegenerateSystem(1.0, 1.05).delta() == doctest::Approx(0.05));
}

TEST_CASE("at zero splitting the dressed generator is the degenerate one") {
  for (double p : {0.0, 0.4, 1.0, -0.7}) {
    const DressedGenerator g = neardegenerate_generator(NearDegenerateSystem(1.3, 1.3), bath_of(0.8, p));
    const GeneratorMatrix ref = coherence_generator(DegenerateSystem(1.3), bath_of(0.8, p));
    CHECK((g.m - ref.m.cast<Complex>()).cwiseAbs().maxCoeff() == 0.0);
    CHECK((g.b - ref.b).cwiseAbs().maxCoeff() == 0.0);
  }
}

TEST_CASE("the splitting couples rho+ and rho- through -i delta") {
  const double delta = 0.02;
  for (double p : {0.0, 1.0}) {
    const DressedGenerator g = neardegenerate_generator(NearDegenerateSystem(1.0, 1.0 + delta), bath_of(1.0, p));
    CHECK(g.m(2, 3).imag() == doctest::Approx(-delta).epsilon(1e-12));
    CHECK(g.m(3, 2).imag() == doctest::Approx(-delta).epsilon(1e-12));
  }
  // Without alignment the populations decouple from the excited coherence.
  const DressedGenerator g0 = neardegenerate_generator(NearDegenerateSystem(1.0, 1.0 + delta), bath_of(1.0, 0.0));
  CHECK(std::abs(g0.m(0, 2)) == 0.0);
  CHECK(std::abs(g0.m(1, 2)) == 0.0);
  CHECK(std::abs(g0.m(2, 0)) == 0.0);
  CHECK(std::abs(g0.m(2, 1)) == 0.0);
}

TEST_CASE("nonsecular dissipator reduces to the dressed generator") {
  oracle::StateSampler s(5);
  for (int n = 0; n < 40; ++n) {
    const double p = s.uniform(-1.0, 1.0), t = s.uniform(0.0, 20.0), delta = s.uniform(0.0, 0.09);
    const NearDegenerateSystem sys(1.0, 1.0 + delta);
    const BathSpec bath = bath_of(s.uniform(0.3, 2.0), p);
    const DressedGenerator g = neardegenerate_generator(sys, bath);
    const Matrix3c r = s.block();
    const Matrix3c rdot = nonsecular_dissipator(r, sys, bath, t);
    // Central difference of the dressed vector along the interaction-picture flow.
    const double h = 1e-5;
    const auto plus = DressedCoherenceVector::from_interaction(DensityMatrix(r + h * rdot), delta, t + h).pi;
    const auto minus = DressedCoherenceVector::from_interaction(DensityMatrix(r - h * rdot), delta, t - h).pi;
    const Eigen::Vector4cd lhs = (plus - minus) / (2 * h);
    const Eigen::Vector4cd pi = DressedCoherenceVector::from_interaction(DensityMatrix(r), delta, t).pi;
    const Eigen::Vector4cd rhs = g.m * pi - g.b.cast<Complex>();
    CHECK((lhs - rhs).cwiseAbs().maxCoeff() < 1e-8);
  }
}

TEST_CASE("nonsecular dissipator at zero splitting is the aligned-dipole GKSL dissipator") {
  oracle::StateSampler s(8);
  for (double p : {0.0, 0.6, 1.0}) {
    const NearDegenerateSystem sys(1.0, 1.0);
    const BathSpec bath = bath_of(1.0, p);
    const Matrix3c r = s.any();
    // The full generator minus the (commutator-free in the interaction picture) Hamiltonian part.
    const Matrix3c h = HamiltonianSpec::degenerate(1.0).matrix();
    const Matrix3c diss = gksl_rhs(r, DegenerateSystem(1.0), bath) + Complex(0, 1) * (h * r - r * h);
    CHECK(oracle::max_abs(nonsecular_dissipator(r, sys, bath, 3.7) - diss) < 1e-14);
  }
}

TEST_CASE("dressing round trip") {
  oracle::StateSampler s(2);
  const Matrix3c r = s.block();
  const auto d = DressedCoherenceVector::from_interaction(DensityMatrix(r), 0.03, 2.0);
  CHECK(std::abs(d.pi(2).imag()) < 1e-15);
  CHECK(std::abs(d.pi(3).real()) < 1e-15);
  CHECK(oracle::max_abs(d.to_interaction(0.03, 2.0).matrix() - r) < 1e-15);
}

TEST_CASE("first-order correction: zero at t = 0 and at zero splitting") {
  const BathSpec bath = bath_of(1.0, 1.0);
  CHECK(first_order_correction(kInit, NearDegenerateSystem(1.0, 1.04), bath, 0.0).cwiseAbs().maxCoeff() < 1e-15);
  CHECK(first_order_correction(kInit, NearDegenerateSystem(1.0, 1.0), bath, 3.0).cwiseAbs().maxCoeff() == 0.0);
  CHECK_THROWS_AS(perturbation_coefficients(kInit, NearDegenerateSystem(1.0, 1.0), bath), InvalidArgument);
}

TEST_CASE("first-order correction solves its own linear equation") {
  for (double beta : {0.5, 1.0, 2.0}) {
    const BathSpec bath = bath_of(beta, 1.0);
    for (double t : {0.5, 2.0, 7.0}) {
      const Eigen::Vector4cd got = first_order_correction(kInit, NearDegenerateSystem(1.0, 1.01), bath, t);
      const Eigen::Vector4cd want = first_order_oracle(kInit, 1.0, 0.01, bath, t);
      CHECK((got - want).cwiseAbs().maxCoeff() < 1e-9);
    }
  }
}

TEST_CASE("perturbative solution: t = 0, zero splitting, second-order error") {
  const BathSpec bath = bath_of(1.0, 1.0);
  const auto at0 = perturbative_solution(kInit, NearDegenerateSystem(1.0, 1.05), bath, 0.0);
  CHECK((at0.pi - DressedCoherenceVector::from_coherence(kInit).pi).cwiseAbs().maxCoeff() < 1e-15);

  const auto flat = perturbative_solution(kInit, NearDegenerateSystem(1.0, 1.0), bath, 2.0);
  const CoherenceVector exact = analytic_evolution_aligned(kInit, DegenerateSystem(1.0), bath, 2.0);
  CHECK((flat.pi - DressedCoherenceVector::from_coherence(exact).pi).cwiseAbs().maxCoeff() < 1e-15);

  CHECK_THROWS_AS(perturbative_solution(kInit, NearDegenerateSystem(1.0, 1.05), bath_of(1.0, 0.9), 1.0),
                  InvalidArgument);

  diagnostics::ScopedSink quiet([](const diagnostics::Record&) {});
  auto error = [&](double delta) {
    const NearDegenerateSystem sys(1.0, 1.0 + delta);
    const auto pi0 = DressedCoherenceVector::from_coherence(kInit);
    EvolveOptions tight;
    tight.abs_tol = tight.rel_tol = 1e-13;
    const auto full = evolve_neardegenerate(pi0, sys, bath, 3.0, tight);
    return (full.pi - perturbative_solution(kInit, sys, bath, 3.0).pi).cwiseAbs().maxCoeff();
  };
  const double e1 = error(0.04), e2 = error(0.02), e3 = error(0.01);
  CHECK(e1 / e2 == doctest::Approx(4.0).epsilon(0.05));
  CHECK(e2 / e3 == doctest::Approx(4.0).epsilon(0.05));
}

TEST_CASE("dressed evolution at zero splitting matches the degenerate evolution") {
  diagnostics::ScopedSink quiet([](const diagnostics::Record&) {});
  for (double p : {0.0, 0.5, 1.0}) {
    const BathSpec bath = bath_of(1.0, p);
    const auto got = evolve_neardegenerate(DressedCoherenceVector::from_coherence(kInit), NearDegenerateSystem(1.0, 1.0),
                                           bath, 4.0);
    const DensityMatrix want = evolve(kInit.to_density(), DegenerateSystem(1.0), bath, 4.0);
    const CoherenceVector w = CoherenceVector::from_density(want), g = got.to_coherence();
    CHECK((w.as_vector() - g.as_vector()).cwiseAbs().maxCoeff() < 1e-9);
  }
}

TEST_CASE("dressed evolution validity window warning") {
  std::vector<std::string> events;
  diagnostics::ScopedSink capture([&](const diagnostics::Record& r) { events.push_back(r.event); });
  const auto pi0 = DressedCoherenceVector::from_coherence(kInit);
  const BathSpec bath = bath_of(1.0, 1.0);
  evolve_neardegenerate(pi0, NearDegenerateSystem(1.0, 1.01), bath, 5.0);
  CHECK(events.empty());
  evolve_neardegenerate(pi0, NearDegenerateSystem(1.0, 1.05), bath, 10.0);
  REQUIRE(events.size() == 1);
  CHECK(events[0] == "neardegen.validity_window");
  evolve_neardegenerate(pi0, NearDegenerateSystem(1.0, 1.01), bath, 0.5);
  CHECK(events.size() == 2);
}

TEST_CASE("independent thermalization") {
  const NearDegenerateSystem sys(1.0, 1.08);
  const BathSpec bath = bath_of(1.5, 1.0);
  const double e2 = std::exp(-1.5 * 1.08), e1 = std::exp(-1.5), z = 1 + e1 + e2;
  oracle::StateSampler s(4);
  const DensityMatrix out = thermalize_independent(DensityMatrix(s.any()), sys, bath);
  CHECK(out.population(Level::two) == doctest::Approx(e2 / z).epsilon(1e-14));
  CHECK(out.population(Level::one) == doctest::Approx(e1 / z).epsilon(1e-14));
  CHECK(l1_coherence(out) == 0.0);
  CHECK(oracle::max_abs(thermalize_independent(out, sys, bath).matrix() - out.matrix()) < 1e-16);
  // It is also the zero of the late-time dissipator.
  CHECK(oracle::max_abs(secular_dissipator(out.matrix(), sys, bath)) < 1e-16);
}

}  // TEST_SUITE
