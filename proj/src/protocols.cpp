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

#include "coherence/protocols.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "coherence/diagnostics.hpp"
#include "coherence/errors.hpp"
#include "coherence/neardegen.hpp"
#include "coherence/ode.hpp"
#include "coherence/thermo.hpp"

namespace coherence {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr Complex kI{0.0, 1.0};

// |2> populations below this are treated as an exactly empty level.
constexpr double kEmptyLevel = 64.0 * std::numeric_limits<double>::epsilon();

DensityMatrix rotate(const Matrix3c& u, const DensityMatrix& rho) {
  return DensityMatrix(u * rho.matrix() * u.adjoint());
}

LedgerStep make_step(std::string label, const DensityMatrix& before, const DensityMatrix& after,
                     double signed_work_out) {
  LedgerStep s;
  s.label = std::move(label);
  s.state_before = before;
  s.state_after = after;
  s.work_out = std::max(signed_work_out, 0.0);
  s.work_in = std::max(-signed_work_out, 0.0);
  s.coherence_before = l1_coherence(before);
  s.coherence_after = l1_coherence(after);
  return s;
}

numerics::RealVector pack(const Matrix3c& m) {
  numerics::RealVector y(18);
  for (int k = 0; k < 9; ++k) {
    y(2 * k) = m(k / 3, k % 3).real();
    y(2 * k + 1) = m(k / 3, k % 3).imag();
  }
  return y;
}

Matrix3c unpack(const numerics::RealVector& y) {
  Matrix3c m;
  for (int k = 0; k < 9; ++k) m(k / 3, k % 3) = {y(2 * k), y(2 * k + 1)};
  return m;
}

// Finite-time relaxation with the lifted level under the independent-channel dissipator.
DensityMatrix relax_split(const DensityMatrix& rho, double omega, double lifted,
                          const BathSpec& bath, const RoundOptions& opts) {
  const NearDegenerateSystem sys(omega, lifted, kInf);
  const HamiltonianSpec h = HamiltonianSpec::split(omega, lifted);
  const Matrix3c hm = h.matrix();
  numerics::OdeConfig cfg;
  cfg.abs_tol = opts.evolve.abs_tol;
  cfg.rel_tol = opts.evolve.rel_tol;
  cfg.method = opts.evolve.method;
  cfg.fixed_step = opts.evolve.fixed_step;
  auto rhs = [&](const numerics::RealVector& y, numerics::RealVector& dydt, double) {
    const Matrix3c r = unpack(y);
    dydt = pack(-kI * (hm * r - r * hm) + secular_dissipator(r, sys, bath));
  };
  const auto sol = numerics::integrate_ode(rhs, pack(rho.matrix()), 0.0,
                                           opts.thermalization_time, {}, cfg);
  return DensityMatrix(unpack(sol.final_state));
}

double single_population(double beta, double level, double other) {
  const double e = std::exp(-beta * level);
  return e / (1.0 + std::exp(-beta * other) + e);
}

double both_population(double beta, double level) {
  const double e = std::exp(-beta * level);
  return 2.0 * e / (1.0 + 2.0 * e);
}

}  // namespace

double ProtocolLedger::net_work() const {
  double sum = 0.0;
  for (const auto& s : steps) sum += s.work_out - s.work_in;
  return sum;
}

void ProtocolLedger::append(const ProtocolLedger& other) {
  steps.insert(steps.end(), other.steps.begin(), other.steps.end());
}

void GeneralInitialState::validate() const {
  if (!(b >= 0.0 && b <= 1.0)) throw InvalidArgument("GeneralInitialState: b must lie in [0, 1]");
  if (!(n_norm >= 0.0 && n_norm <= 1.0)) {
    throw InvalidArgument("GeneralInitialState: |n| must lie in [0, 1]");
  }
  if (!std::isfinite(theta) || !std::isfinite(phi)) {
    throw InvalidArgument("GeneralInitialState: angles must be finite");
  }
}

DensityMatrix GeneralInitialState::density() const {
  validate();
  const double h = 0.5 * (1.0 - b);
  const double nx = n_norm * std::sin(theta) * std::cos(phi);
  const double ny = n_norm * std::sin(theta) * std::sin(phi);
  const double nz = n_norm * std::cos(theta);
  Matrix3c m = Matrix3c::Zero();
  m(0, 0) = h * (1.0 + nz);
  m(1, 1) = h * (1.0 - nz);
  m(0, 1) = h * Complex(nx, -ny);
  m(1, 0) = h * Complex(nx, ny);
  m(2, 2) = b;
  return DensityMatrix(m);
}

GeneralInitialState GeneralInitialState::from_density(const DensityMatrix& rho) {
  const Matrix3c& m = rho.matrix();
  const int g = index_of(Level::ground);
  if (std::abs(m(0, g)) > 1e-12 || std::abs(m(1, g)) > 1e-12) {
    throw InvalidArgument("GeneralInitialState::from_density: state has ground-excited coherence");
  }
  GeneralInitialState s;
  s.b = m(2, 2).real();
  const double excited = 1.0 - s.b;
  s.theta = M_PI;
  s.phi = 0.0;
  s.n_norm = 0.0;
  if (excited <= 0.0) return s;
  const double nx = 2.0 * m(1, 0).real() / excited;
  const double ny = 2.0 * m(1, 0).imag() / excited;
  const double nz = (m(0, 0).real() - m(1, 1).real()) / excited;
  s.n_norm = std::min(1.0, std::sqrt(nx * nx + ny * ny + nz * nz));
  if (s.n_norm == 0.0) return s;
  s.theta = std::acos(std::clamp(nz / std::sqrt(nx * nx + ny * ny + nz * nz), -1.0, 1.0));
  s.phi = std::atan2(ny, nx);
  return s;
}

Matrix3c coherence_unitary(double theta, double phi) {
  const double s = std::sin(0.5 * theta);
  const double c = std::cos(0.5 * theta);
  Matrix3c u = Matrix3c::Zero();
  u(0, 0) = -s;
  u(0, 1) = std::exp(-kI * phi) * c;
  u(1, 0) = std::exp(kI * phi) * c;
  u(1, 1) = s;
  u(2, 2) = 1.0;
  return u;
}

Matrix3c protocol1_unitary() {
  const double r = 1.0 / std::sqrt(2.0);
  Matrix3c u = Matrix3c::Zero();
  u(0, 0) = r;
  u(0, 1) = -r;
  u(1, 0) = r;
  u(1, 1) = r;
  u(2, 2) = 1.0;
  return u;
}

RoundPlan RoundPlan::make(int index, double shift, double omega, double beta) {
  RoundPlan p;
  p.index = index;
  p.shift = shift;
  p.lifted_level = omega + shift;
  p.partition = 1.0 + std::exp(-beta * omega) + std::exp(-beta * p.lifted_level);
  return p;
}

double protocol1_round_work(double shift, double p2, double omega, double beta) {
  const double u = std::exp(-beta * (omega + shift));
  const double z = 1.0 + std::exp(-beta * omega) + u;
  return shift * (u / z - p2);
}

RoundResult protocol1_round(const DensityMatrix& state, double omega, double shift,
                            const BathSpec& bath, int round_index, const RoundOptions& opts) {
  if (!(shift > 0.0) || !std::isfinite(shift)) {
    throw InvalidArgument("protocol1_round: level shift must be positive and finite");
  }
  if (bath.alignment() != 1.0) {
    throw InvalidArgument("protocol1_round: requires aligned dipoles (p = 1)");
  }
  const DegenerateSystem sys(omega);
  RoundResult out;
  out.plan = RoundPlan::make(round_index, shift, omega, bath.beta());

  const DensityMatrix rotated = rotate(protocol1_unitary(), state);
  out.ledger.steps.push_back(make_step("rotate", state, rotated, 0.0));

  // Populations of order -1e-17 are rounding, not physics.
  out.lift_work = shift * std::max(0.0, rotated.population(Level::two));
  out.ledger.steps.push_back(make_step("lift_level_2", rotated, rotated, -out.lift_work));

  const DensityMatrix hot =
      opts.finite_time
          ? relax_split(rotated, omega, out.plan.lifted_level, bath, opts)
          : thermalize_independent(rotated, NearDegenerateSystem(omega, out.plan.lifted_level, kInf),
                                   bath);
  out.ledger.steps.push_back(make_step("thermalize_lifted", rotated, hot, 0.0));

  // Isolated lowering: Tr(rho H_lifted) - Tr(rho H).
  out.extracted_work = shift * std::max(0.0, hot.population(Level::two));
  out.ledger.steps.push_back(make_step("lower_level_2", hot, hot, out.extracted_work));

  out.final_state = opts.finite_time
                        ? evolve(hot, sys, bath, opts.thermalization_time, opts.evolve)
                        : steady_state(sys, bath, CoherenceVector::from_density(hot));
  out.ledger.steps.push_back(make_step("rethermalize", hot, out.final_state, 0.0));
  return out;
}

double optimal_shift_round1(double beta, double omega) {
  if (!(beta > 0.0) || !(omega > 0.0)) {
    throw InvalidArgument("optimal_shift_round1: beta and omega must be positive");
  }
  const double z = 1.0 / ((1.0 + std::exp(beta * omega)) * std::exp(1.0));
  return (1.0 + numerics::lambert_w_principal(z)) / beta;
}

double shift_upper_bound(double p2, double omega, double beta) {
  if (p2 <= 0.0) return kInf;
  const double x = std::exp(-beta * omega);
  return std::log(x * (1.0 - p2) / (p2 * (1.0 + x))) / beta;
}

double rotated_upper_population(const RoundPlan& prev, double omega, double beta) {
  const double x = std::exp(-beta * omega);
  return x * (1.0 + std::exp(-beta * prev.shift)) / (2.0 * prev.partition);
}

std::optional<ShiftChoice> optimal_shift_for(double p2, double omega, double beta) {
  if (!(beta > 0.0) || !(omega > 0.0)) {
    throw InvalidArgument("optimal_shift_for: beta and omega must be positive");
  }
  const double x = std::exp(-beta * omega);
  ShiftChoice choice;
  if (p2 <= kEmptyLevel) {
    // Empty |2>: the stationarity condition Z = shift beta (1 + x) solves in closed form.
    choice.shift = optimal_shift_round1(beta, omega);
    choice.upper_bound = kInf;
    const double u = std::exp(-beta * (omega + choice.shift));
    const double z = 1.0 + x + u;
    choice.residual = u * (choice.shift * beta * (1.0 + x) - z);
    choice.interior = true;
    choice.stationary = true;
  } else {
    choice.upper_bound = shift_upper_bound(p2, omega, beta);
    if (!(choice.upper_bound > 0.0)) return std::nullopt;
    const double r = 1.0 / p2;
    auto f = [&](double w) {
      const double u = x * std::exp(-beta * w);
      const double z = 1.0 + x + u;
      return z * z - z * u * r + w * beta * (1.0 + x) * u * r;
    };
    auto df = [&](double w) {
      const double u = x * std::exp(-beta * w);
      const double z = 1.0 + x + u;
      return -2.0 * beta * u * z + beta * r * u * (z + u) + beta * (1.0 + x) * r * u * (1.0 - beta * w);
    };
    const double ub = choice.upper_bound;
    choice.shift = numerics::find_root_bracketed(f, df, 0.0, ub, 4.0 * 2.2e-16 * ub, 1e-15);
    choice.residual = f(choice.shift);
    choice.interior = choice.shift > 0.0 && choice.shift < ub;
    choice.stationary = true;
  }

  auto work = [&](double w) { return protocol1_round_work(w, p2, omega, beta); };
  const double h = 1e-3 * choice.shift;
  const double w0 = work(choice.shift);
  choice.is_maximum = w0 >= work(choice.shift - h) && w0 >= work(choice.shift + h);
  if (!(choice.interior && choice.is_maximum)) {
    diagnostics::emit(diagnostics::Severity::warn, "protocol1.stationary_point_rejected",
                      {{"shift", choice.shift},
                       {"upper_bound", choice.upper_bound},
                       {"interior", choice.interior},
                       {"is_maximum", choice.is_maximum}});
    const double hi = std::isfinite(choice.upper_bound) ? choice.upper_bound : 50.0 / beta;
    const auto best = numerics::maximize_scalar(work, 0.0, hi, 1e-12 * hi);
    choice.shift = best.argmax;
    choice.stationary = false;
    choice.interior = !best.at_boundary;
    choice.is_maximum = true;
  }
  return choice;
}

std::optional<ShiftChoice> optimal_shift_next(const RoundPlan& prev, double beta, double omega) {
  return optimal_shift_for(rotated_upper_population(prev, omega, beta), omega, beta);
}

Protocol1Result run_protocol1(const DensityMatrix& initial, double omega, const BathSpec& bath,
                              const StopRule& stop, const RoundOptions& opts) {
  if (stop.max_rounds < 1) throw InvalidArgument("run_protocol1: max_rounds must be >= 1");
  if (!(stop.shift_floor >= 0.0)) throw InvalidArgument("run_protocol1: shift floor must be >= 0");
  Protocol1Result out;
  out.final_state = initial;
  out.stop_reason = "max_rounds";
  for (int i = 1; i <= stop.max_rounds; ++i) {
    const double p2 = rotate(protocol1_unitary(), out.final_state).population(Level::two);
    const auto choice = optimal_shift_for(p2, omega, bath.beta());
    if (!choice) {
      out.stop_reason = "no_admissible_shift";
      break;
    }
    if (choice->shift < stop.shift_floor) {
      out.stop_reason = "shift_floor";
      break;
    }
    RoundResult round = protocol1_round(out.final_state, omega, choice->shift, bath, i, opts);
    RoundSummary summary;
    summary.plan = round.plan;
    summary.choice = *choice;
    summary.lift_work = round.lift_work;
    summary.extracted_work = round.extracted_work;
    summary.net_work = round.net_work();
    summary.coherence_after = l1_coherence(round.final_state);
    out.rounds.push_back(summary);
    out.ledger.append(round.ledger);
    out.final_state = round.final_state;
    out.total_work += summary.net_work;
  }
  return out;
}

Protocol2Result protocol2(const GeneralInitialState& init, double omega, const BathSpec& bath,
                          WorkEvaluation eval, const numerics::SolverConfig& quad) {
  init.validate();
  if (!(omega > 0.0)) throw InvalidArgument("protocol2: omega must be positive");
  if (!(init.b > 0.0)) {
    throw InvalidArgument("protocol2: no ground population (b = 0); level matching is undefined");
  }
  const double beta = bath.beta();
  const double p0 = init.b;
  const double p1 = 0.5 * (1.0 - init.b) * (1.0 + init.n_norm);
  const double p2 = 0.5 * (1.0 - init.b) * (1.0 - init.n_norm);
  // Matching: e^{-beta omega_k} = P_k / P0; an empty level sits at infinity.
  auto matched = [&](double pk) { return pk > 0.0 ? -std::log(pk / p0) / beta : kInf; };

  Protocol2Result out;
  out.omega1 = matched(p1);
  out.omega2 = matched(p2);
  out.w1 = p1 > 0.0 ? p1 * (omega - out.omega1) : 0.0;
  out.w1_prime = p2 > 0.0 ? p2 * (out.omega2 - omega) : 0.0;
  if (eval == WorkEvaluation::closed_form) {
    out.w2 = quasistatic_work(beta, out.omega2, out.omega1, out.omega1, SweepMode::single_level);
    out.w2_prime = -quasistatic_work(beta, out.omega1, omega, 0.0, SweepMode::both_levels);
  } else {
    out.w2 = quasistatic_work_quadrature(beta, out.omega2, out.omega1, out.omega1,
                                         SweepMode::single_level, quad);
    out.w2_prime =
        -quasistatic_work_quadrature(beta, out.omega1, omega, 0.0, SweepMode::both_levels, quad);
  }

  const DensityMatrix rho_s = init.density();
  const DensityMatrix rotated = rotate(coherence_unitary(init.theta, init.phi), rho_s);
  const DensityMatrix swept = gibbs(HamiltonianSpec::split(out.omega1, out.omega1), beta);
  const DensityMatrix final_state = gibbs(HamiltonianSpec::degenerate(omega), beta);
  out.ledger.steps.push_back(make_step("rotate", rho_s, rotated, 0.0));
  out.ledger.steps.push_back(make_step("lower_level_1", rotated, rotated, out.w1));
  out.ledger.steps.push_back(make_step("raise_level_2", rotated, rotated, -out.w1_prime));
  out.ledger.steps.push_back(make_step("isothermal_sweep_level_2", rotated, swept, out.w2));
  out.ledger.steps.push_back(make_step("isothermal_lift_both", swept, final_state, -out.w2_prime));
  out.net_work = out.w1 + out.w2 - out.w1_prime - out.w2_prime;
  out.fed = fed(rho_s, HamiltonianSpec::degenerate(omega), beta);
  return out;
}

double quasistatic_work(double beta, double omega_from, double omega_to, double fixed_other_level,
                        SweepMode mode) {
  if (!(beta > 0.0)) throw InvalidArgument("quasistatic_work: beta must be positive");
  if (omega_from == omega_to) return 0.0;
  const double ef = std::exp(-beta * omega_from);
  const double et = std::exp(-beta * omega_to);
  if (mode == SweepMode::both_levels) {
    return std::log((1.0 + 2.0 * et) / (1.0 + 2.0 * ef)) / beta;
  }
  const double eo = std::exp(-beta * fixed_other_level);
  return std::log((1.0 + eo + et) / (1.0 + eo + ef)) / beta;
}

double quasistatic_work_quadrature(double beta, double omega_from, double omega_to,
                                   double fixed_other_level, SweepMode mode,
                                   const numerics::SolverConfig& cfg) {
  if (!(beta > 0.0)) throw InvalidArgument("quasistatic_work_quadrature: beta must be positive");
  if (omega_from == omega_to) return 0.0;
  const double eo = std::exp(-beta * fixed_other_level);
  // W = -int p(omega') d omega'. With u = e^{-beta omega'} the integrand is a
  // smooth rational function on a bounded interval, even when an endpoint is
  // +infinity or the sweep is long enough for p to underflow.
  auto g = [&](double u) {
    return mode == SweepMode::both_levels ? 2.0 / (beta * (1.0 + 2.0 * u))
                                          : 1.0 / (beta * (1.0 + eo + u));
  };
  return numerics::integrate_1d(g, std::exp(-beta * omega_from), std::exp(-beta * omega_to), cfg);
}

double discretized_quasistatic(double beta, double omega_from, double omega_to,
                               double fixed_other_level, int steps, SweepMode mode) {
  if (steps < 1) throw InvalidArgument("discretized_quasistatic: need at least one step");
  if (!(beta > 0.0)) throw InvalidArgument("discretized_quasistatic: beta must be positive");
  if (!std::isfinite(omega_from) || !std::isfinite(omega_to)) {
    throw InvalidArgument("discretized_quasistatic: endpoints must be finite");
  }
  double work = 0.0;
  double level = omega_from;
  for (int k = 1; k <= steps; ++k) {
    const double next =
        omega_from + (omega_to - omega_from) * static_cast<double>(k) / static_cast<double>(steps);
    // Thermal population at the current level, then an isolated jump to the next level.
    const double pop = mode == SweepMode::both_levels
                           ? both_population(beta, level)
                           : single_population(beta, level, fixed_other_level);
    work += pop * (level - next);
    level = next;
  }
  return work;
}

}  // namespace coherence
