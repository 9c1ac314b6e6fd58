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

#include "coherence/ode.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include <boost/numeric/odeint.hpp>
#include <boost/numeric/odeint/external/eigen/eigen.hpp>

#include "coherence/errors.hpp"

namespace coherence::numerics {

namespace odeint = boost::numeric::odeint;

namespace {

void check_samples(std::span<const double> samples, double t0, double t1) {
  for (std::size_t i = 0; i < samples.size(); ++i) {
    if (samples[i] < t0 || samples[i] > t1) {
      throw InvalidArgument("integrate_ode: sample time outside [t0, t1]");
    }
    if (i > 0 && samples[i] < samples[i - 1]) {
      throw InvalidArgument("integrate_ode: sample times must be sorted");
    }
  }
}

void check_finite(const RealVector& y, double t) {
  if (!y.allFinite()) {
    throw NumericalError("integrate_ode: state became non-finite at t = " + std::to_string(t), t);
  }
}

OdeSolution integrate_dopri5(const OdeRhs& rhs, const RealVector& y0, double t0, double t1,
                             std::span<const double> samples, const OdeConfig& cfg) {
  using Stepper = odeint::runge_kutta_dopri5<RealVector, double, RealVector, double,
                                             odeint::vector_space_algebra>;
  auto stepper = odeint::make_dense_output(cfg.abs_tol, cfg.rel_tol, Stepper());
  auto system = [&rhs](const RealVector& y, RealVector& dydt, double t) {
    dydt.resize(y.size());
    rhs(y, dydt, t);
  };

  OdeSolution sol;
  const bool every_step = samples.empty();
  std::size_t next = 0;
  auto record = [&sol](double t, const RealVector& y) {
    sol.times.push_back(t);
    sol.states.push_back(y);
  };
  while (next < samples.size() && samples[next] <= t0) record(samples[next++], y0);
  if (every_step) record(t0, y0);
  if (t1 == t0) {
    sol.final_state = y0;
    return sol;
  }

  const double h0 = std::min(cfg.initial_step, t1 - t0);
  stepper.initialize(y0, t0, h0);
  RealVector scratch(y0.size());
  try {
    while (stepper.current_time() < t1) {
      const auto [t_old, t_new] = stepper.do_step(system);
      ++sol.steps;
      check_finite(stepper.current_state(), t_new);
      const double min_step = 1e-14 * std::max(1.0, std::abs(t_new));
      if (t_new - t_old < min_step && t_new < t1) {
        throw NumericalError("integrate_ode: step size underflow at t = " + std::to_string(t_new),
                             t_new);
      }
      if (sol.steps > cfg.max_steps) {
        throw NumericalError("integrate_ode: step budget exhausted at t = " +
                                 std::to_string(t_new),
                             t_new);
      }
      while (next < samples.size() && samples[next] <= t_new) {
        stepper.calc_state(samples[next], scratch);
        record(samples[next++], scratch);
      }
      if (every_step) {
        if (t_new <= t1) {
          record(t_new, stepper.current_state());
        } else {
          stepper.calc_state(t1, scratch);
          record(t1, scratch);
        }
      }
    }
  } catch (const odeint::odeint_error& e) {
    throw NumericalError(std::string("integrate_ode: ") + e.what(), stepper.current_time());
  }
  if (stepper.current_time() > t1) {
    stepper.calc_state(t1, scratch);
    sol.final_state = scratch;
  } else {
    sol.final_state = stepper.current_state();
  }
  return sol;
}

OdeSolution integrate_rk4(const OdeRhs& rhs, const RealVector& y0, double t0, double t1,
                          std::span<const double> samples, const OdeConfig& cfg) {
  if (!(cfg.fixed_step > 0.0)) throw InvalidArgument("integrate_ode: fixed_step must be positive");
  odeint::runge_kutta4<RealVector, double, RealVector, double, odeint::vector_space_algebra>
      stepper;
  auto system = [&rhs](const RealVector& y, RealVector& dydt, double t) {
    dydt.resize(y.size());
    rhs(y, dydt, t);
  };

  std::vector<double> breaks(samples.begin(), samples.end());
  breaks.push_back(t1);
  OdeSolution sol;
  const bool every_step = samples.empty();
  RealVector y = y0;
  double t = t0;
  if (every_step) {
    sol.times.push_back(t0);
    sol.states.push_back(y0);
  }
  for (std::size_t i = 0; i < breaks.size(); ++i) {
    const double target = breaks[i];
    const double span = target - t;
    if (span > 0.0) {
      const long n = static_cast<long>(std::ceil(span / cfg.fixed_step - 1e-12));
      const double h = span / static_cast<double>(n);
      for (long k = 0; k < n; ++k) {
        stepper.do_step(system, y, t, h);
        t = (k + 1 == n) ? target : t + h;
        ++sol.steps;
        check_finite(y, t);
        if (sol.steps > cfg.max_steps) {
          throw NumericalError("integrate_ode: step budget exhausted", t);
        }
        if (every_step) {
          sol.times.push_back(t);
          sol.states.push_back(y);
        }
      }
    }
    if (i + 1 < breaks.size()) {
      sol.times.push_back(target);
      sol.states.push_back(y);
    }
  }
  sol.final_state = y;
  return sol;
}

}  // namespace

OdeSolution integrate_ode(const OdeRhs& rhs, const RealVector& y0, double t0, double t1,
                          std::span<const double> sample_times, const OdeConfig& cfg) {
  if (!(t1 >= t0)) throw InvalidArgument("integrate_ode: t1 must not precede t0");
  if (!(cfg.abs_tol > 0.0) || !(cfg.rel_tol > 0.0)) {
    throw InvalidArgument("integrate_ode: tolerances must be positive");
  }
  check_samples(sample_times, t0, t1);
  check_finite(y0, t0);
  switch (cfg.method) {
    case OdeMethod::fixed_rk4:
      return integrate_rk4(rhs, y0, t0, t1, sample_times, cfg);
    case OdeMethod::dopri5:
    default:
      return integrate_dopri5(rhs, y0, t0, t1, sample_times, cfg);
  }
}

}  // namespace coherence::numerics
