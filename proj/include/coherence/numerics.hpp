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

#include <cmath>
#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <utility>

#include "coherence/errors.hpp"

namespace coherence::numerics {

struct SolverConfig {
  double abs_tol = 1e-10;
  double rel_tol = 1e-10;
  int max_iter = 10000;
  std::optional<std::pair<double, double>> bracket;

  /// Tolerances must lie in (0, 1e-2]; max_iter > 0; lo < hi when a bracket is set.
  void validate() const;
};

/// Principal branch W_0 of the Lambert W function, w e^w = z with w >= -1.
/// Rejects z < -1/e.
double lambert_w_principal(double z);

template <class Real>
struct ScalarMaximum {
  Real argmax;
  Real value;
  bool at_boundary = false;  // the maximum sits on an end of the bracket
  int iterations = 0;
};

/// Golden-section maximization of f on [lo, hi] down to an argument
/// tolerance abs_tol. Templated on the arithmetic type so that oracles can run
/// in extended precision where double cannot resolve a flat maximum.
template <class Real, class F>
ScalarMaximum<Real> maximize_scalar(F&& f, Real lo, Real hi, Real abs_tol, int max_iter = 10000) {
  if (!(lo < hi)) throw InvalidArgument("maximize_scalar: bracket must satisfy lo < hi");
  if (!(abs_tol > 0)) throw InvalidArgument("maximize_scalar: tolerance must be positive");
  auto eval = [&](Real x) {
    const Real v = f(x);
    if (!std::isfinite(static_cast<long double>(v))) {
      throw NumericalError("maximize_scalar: objective is not finite at x = " +
                           std::to_string(static_cast<double>(x)));
    }
    return v;
  };
  const Real inv_phi = (std::sqrt(Real(5)) - Real(1)) / Real(2);
  Real a = lo;
  Real b = hi;
  Real c = b - inv_phi * (b - a);
  Real d = a + inv_phi * (b - a);
  Real fc = eval(c);
  Real fd = eval(d);
  int it = 0;
  while (b - a > abs_tol && it < max_iter) {
    if (fc >= fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - inv_phi * (b - a);
      fc = eval(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + inv_phi * (b - a);
      fd = eval(d);
    }
    ++it;
  }
  if (b - a > abs_tol) {
    throw NumericalError("maximize_scalar: no convergence within " + std::to_string(max_iter) +
                         " iterations");
  }
  ScalarMaximum<Real> out{(a + b) / Real(2), Real(0), false, it};
  out.value = eval(out.argmax);
  const Real f_lo = eval(lo);
  const Real f_hi = eval(hi);
  if (f_lo > out.value && f_lo >= f_hi) {
    out = {lo, f_lo, true, it};
  } else if (f_hi > out.value) {
    out = {hi, f_hi, true, it};
  } else if (out.argmax - lo <= abs_tol || hi - out.argmax <= abs_tol) {
    out.at_boundary = true;
  }
  return out;
}

/// Root of a continuous function on [lo, hi] with f(lo), f(hi) of opposite
/// sign. Newton steps using df when they stay inside the current bracket,
/// bisection otherwise. Converges when the bracket is below abs_tol or
/// |f| <= residual_tol.
double find_root_bracketed(const std::function<double(double)>& f,
                           const std::function<double(double)>& df, double lo, double hi,
                           double abs_tol, double residual_tol, int max_iter = 500);

/// Adaptive Gauss-Kronrod (7/15) quadrature of f over [a, b]. Reports
/// non-convergence as NumericalError.
double integrate_1d(const std::function<double(double)>& f, double a, double b,
                    const SolverConfig& cfg = {});

}  // namespace coherence::numerics
