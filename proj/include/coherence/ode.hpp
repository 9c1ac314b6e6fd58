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

#include <functional>
#include <span>
#include <vector>

#include <Eigen/Dense>

namespace coherence::numerics {

using RealVector = Eigen::VectorXd;

/// dy/dt = rhs(y, t), written into dydt (already sized like y).
using OdeRhs = std::function<void(const RealVector& y, RealVector& dydt, double t)>;

enum class OdeMethod {
  dopri5,     // adaptive embedded Runge-Kutta 5(4) with dense output
  fixed_rk4,  // classical RK4 on a uniform grid
};

struct OdeConfig {
  double abs_tol = 1e-10;
  double rel_tol = 1e-10;
  OdeMethod method = OdeMethod::dopri5;
  double initial_step = 1e-3;
  double fixed_step = 1e-3;
  long max_steps = 10'000'000;
};

struct OdeSolution {
  std::vector<double> times;
  std::vector<RealVector> states;
  RealVector final_state;
  long steps = 0;
};

/// Integrates from t0 to t1. With sample_times (sorted, inside [t0, t1]) the
/// trajectory holds the dense-output state at exactly those times; without,
/// it holds every accepted step. Step-size underflow, step-count exhaustion
/// and non-finite states raise NumericalError carrying the time reached.
OdeSolution integrate_ode(const OdeRhs& rhs, const RealVector& y0, double t0, double t1,
                          std::span<const double> sample_times = {},
                          const OdeConfig& cfg = {});

}  // namespace coherence::numerics
