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


// Python bindings: thin wrappers that take and return numpy arrays and dicts.

#include <pybind11/complex.h>
#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "coherence/bath.hpp"
#include "coherence/bloch.hpp"
#include "coherence/dynamics.hpp"
#include "coherence/errors.hpp"
#include "coherence/neardegen.hpp"
#include "coherence/numerics.hpp"
#include "coherence/protocols.hpp"
#include "coherence/thermo.hpp"

namespace py = pybind11;
using namespace coherence;

namespace {

DensityMatrix as_density(const Matrix3c& m) { return DensityMatrix(m); }

EvolveOptions tolerances(double abs_tol, double rel_tol) {
  EvolveOptions o;
  o.abs_tol = abs_tol;
  o.rel_tol = rel_tol;
  return o;
}

py::dict ledger_dict(const ProtocolLedger& ledger) {
  py::list steps;
  for (const auto& s : ledger.steps) {
    py::dict d;
    d["label"] = s.label;
    d["work_in"] = s.work_in;
    d["work_out"] = s.work_out;
    d["coherence_before"] = s.coherence_before;
    d["coherence_after"] = s.coherence_after;
    d["state"] = s.state_after.matrix();
    steps.append(d);
  }
  py::dict out;
  out["steps"] = steps;
  out["net_work"] = ledger.net_work();
  return out;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Coherence-powered work extraction from a V-type three-level atom";
  m.attr("__version__") = COHERENCE_ENGINE_VERSION;

  // InvalidArgument derives from std::invalid_argument and already maps to ValueError.
  py::register_exception<NumericalError>(m, "NumericalError", PyExc_RuntimeError);

  py::class_<BathSpec>(m, "Bath")
      .def(py::init([](double beta, double gamma_plus, double alignment) {
             return BathSpec(beta, RateProfile::constant(gamma_plus), alignment);
           }),
           py::arg("beta"), py::arg("gamma_plus") = 1.0, py::arg("alignment") = 1.0)
      .def_property_readonly("beta", &BathSpec::beta)
      .def_property_readonly("alignment", &BathSpec::alignment)
      .def("rates", [](const BathSpec& b, double omega) {
        const RatePair r = rates_at(b, omega);
        return py::make_tuple(r.gamma_plus, r.gamma_minus);
      }, py::arg("omega"), "(gamma_plus, gamma_minus) at a transition frequency")
      .def("__repr__", [](const BathSpec& b) {
        return "Bath(beta=" + std::to_string(b.beta()) + ", alignment=" + std::to_string(b.alignment()) + ")";
      });

  // States are plain 3x3 complex arrays in basis order (|2>, |1>, |0>).
  m.def("ground_state", [] { return DensityMatrix::ground().matrix(); });
  m.def("gibbs", [](double omega, double beta) { return gibbs(HamiltonianSpec::degenerate(omega), beta).matrix(); },
        py::arg("omega"), py::arg("beta"));
  m.def("coherence_state", [](double a, double b, double c, double d) {
    return CoherenceVector{a, b, c, d}.to_density().matrix();
  }, py::arg("a"), py::arg("b"), py::arg("c") = 0.0, py::arg("d") = 0.0,
        "State with rho22 = a, rho00 = b, rho21 = c + i d.");
  m.def("general_state", [](double b, double n, double theta, double phi) {
    return GeneralInitialState{b, n, theta, phi}.density().matrix();
  }, py::arg("b"), py::arg("n"), py::arg("theta") = 0.0, py::arg("phi") = 0.0);

  m.def("l1_coherence", [](const Matrix3c& rho) { return l1_coherence(as_density(rho)); });
  m.def("trace_distance", [](const Matrix3c& a, const Matrix3c& b) {
    return trace_distance(as_density(a), as_density(b));
  });
  m.def("min_eigenvalue", [](const Matrix3c& rho) { return min_eigenvalue(as_density(rho)); });
  m.def("von_neumann_entropy", [](const Matrix3c& rho) { return von_neumann_entropy(as_density(rho)); });
  m.def("fed", [](const Matrix3c& rho, double omega, double beta) {
    return fed(as_density(rho), HamiltonianSpec::degenerate(omega), beta);
  }, py::arg("rho"), py::arg("omega"), py::arg("beta"));
  m.def("to_bloch", [](const Matrix3c& rho) {
    const BlochVector q = to_bloch(as_density(rho));
    return std::vector<Complex>(q.components.begin(), q.components.end());
  });

  m.def("evolve", [](const Matrix3c& rho, double omega, const BathSpec& bath, double t, double abs_tol, double rel_tol) {
    py::gil_scoped_release release;
    return evolve(as_density(rho), DegenerateSystem(omega), bath, t, tolerances(abs_tol, rel_tol)).matrix();
  }, py::arg("rho"), py::arg("omega"), py::arg("bath"), py::arg("t"), py::arg("abs_tol") = 1e-10,
        py::arg("rel_tol") = 1e-10);
  m.def("steady_state", [](double omega, const BathSpec& bath, const Matrix3c& init) {
    return steady_state(DegenerateSystem(omega), bath, CoherenceVector::from_density(as_density(init))).matrix();
  }, py::arg("omega"), py::arg("bath"), py::arg("init"));
  m.def("analytic_evolution_aligned", [](const Matrix3c& init, double omega, const BathSpec& bath, double t) {
    return analytic_evolution_aligned(CoherenceVector::from_density(as_density(init)), DegenerateSystem(omega), bath, t)
        .to_density()
        .matrix();
  }, py::arg("init"), py::arg("omega"), py::arg("bath"), py::arg("t"));

  m.def("perturbative_solution", [](const Matrix3c& init, double omega1, double omega2, const BathSpec& bath, double t) {
    return perturbative_solution(CoherenceVector::from_density(as_density(init)),
                                 NearDegenerateSystem(omega1, omega2), bath, t).pi;
  }, py::arg("init"), py::arg("omega1"), py::arg("omega2"), py::arg("bath"), py::arg("t"),
        "Dressed (rho22, rho00, rho+, rho-) to first order in the splitting.");
  m.def("evolve_neardegenerate", [](const Matrix3c& init, double omega1, double omega2, const BathSpec& bath, double t) {
    const auto pi0 = DressedCoherenceVector::from_coherence(CoherenceVector::from_density(as_density(init)));
    return evolve_neardegenerate(pi0, NearDegenerateSystem(omega1, omega2), bath, t).pi;
  }, py::arg("init"), py::arg("omega1"), py::arg("omega2"), py::arg("bath"), py::arg("t"));

  m.def("lambert_w", &numerics::lambert_w_principal, py::arg("z"));
  m.def("optimal_shift_round1", &optimal_shift_round1, py::arg("beta"), py::arg("omega"));

  m.def("run_protocol1", [](const Matrix3c& rho, double omega, const BathSpec& bath, int max_rounds, double shift_floor) {
    const Protocol1Result r = run_protocol1(as_density(rho), omega, bath, StopRule{max_rounds, shift_floor});
    py::list rounds;
    for (const auto& s : r.rounds) {
      py::dict d;
      d["shift"] = s.plan.shift;
      d["lift_work"] = s.lift_work;
      d["extracted_work"] = s.extracted_work;
      d["net_work"] = s.net_work;
      d["coherence_after"] = s.coherence_after;
      rounds.append(d);
    }
    py::dict out;
    out["total_work"] = r.total_work;
    out["stop_reason"] = r.stop_reason;
    out["final_state"] = r.final_state.matrix();
    out["rounds"] = rounds;
    out["ledger"] = ledger_dict(r.ledger);
    return out;
  }, py::arg("rho"), py::arg("omega"), py::arg("bath"), py::arg("max_rounds") = 1000, py::arg("shift_floor") = 1e-6);

  m.def("protocol2", [](double b, double n, double theta, double phi, double omega, const BathSpec& bath, bool quadrature) {
    const Protocol2Result r = protocol2(GeneralInitialState{b, n, theta, phi}, omega, bath,
                                        quadrature ? WorkEvaluation::quadrature : WorkEvaluation::closed_form);
    py::dict out;
    out["omega1"] = r.omega1;
    out["omega2"] = r.omega2;
    out["w1"] = r.w1;
    out["w1_prime"] = r.w1_prime;
    out["w2"] = r.w2;
    out["w2_prime"] = r.w2_prime;
    out["net_work"] = r.net_work;
    out["fed"] = r.fed;
    out["ledger"] = ledger_dict(r.ledger);
    return out;
  }, py::arg("b"), py::arg("n"), py::arg("theta"), py::arg("phi"), py::arg("omega"), py::arg("bath"),
        py::arg("quadrature") = false);

  m.def("quasistatic_work", [](double beta, double omega_from, double omega_to, double other, bool both) {
    return quasistatic_work(beta, omega_from, omega_to, other, both ? SweepMode::both_levels : SweepMode::single_level);
  }, py::arg("beta"), py::arg("omega_from"), py::arg("omega_to"), py::arg("other"), py::arg("both_levels") = false);
  m.def("discretized_quasistatic", [](double beta, double omega_from, double omega_to, double other, int steps) {
    return discretized_quasistatic(beta, omega_from, omega_to, other, steps);
  }, py::arg("beta"), py::arg("omega_from"), py::arg("omega_to"), py::arg("other"), py::arg("steps"));
}
