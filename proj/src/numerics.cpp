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

#include "coherence/numerics.hpp"

#include <algorithm>
#include <cmath>

#include <boost/math/quadrature/gauss_kronrod.hpp>

namespace coherence::numerics {

void SolverConfig::validate() const {
  auto tol_ok = [](double t) { return t > 0.0 && t <= 1e-2; };
  if (!tol_ok(abs_tol) || !tol_ok(rel_tol)) {
    throw InvalidArgument("solver tolerances must lie in (0, 1e-2]");
  }
  if (max_iter <= 0) throw InvalidArgument("solver max_iter must be positive");
  if (bracket && !(bracket->first < bracket->second)) {
    throw InvalidArgument("solver bracket must satisfy lo < hi");
  }
}

double lambert_w_principal(double z) {
  if (std::isnan(z)) throw InvalidArgument("lambert_w_principal: z is NaN");
  if (z == 0.0) return 0.0;
  if (std::isinf(z)) {
    if (z > 0) return z;
    throw InvalidArgument("lambert_w_principal: z < -1/e");
  }
  const double branch = std::fma(M_E, z, 1.0);  // e z + 1
  if (branch < 0.0) {
    if (branch > -4.0 * std::numeric_limits<double>::epsilon()) return -1.0;
    throw InvalidArgument("lambert_w_principal: z < -1/e has no real solution");
  }
  if (branch == 0.0) return -1.0;

  double w;
  if (branch < 0.3) {
    // Series about the branch point z = -1/e.
    const double p = std::sqrt(2.0 * branch);
    w = -1.0 + p * (1.0 + p * (-1.0 / 3.0 + p * (11.0 / 72.0)));
  } else if (z < 3.0) {
    w = std::log1p(z) * (z < 0.0 ? 1.2 : 0.75);
  } else {
    const double l1 = std::log(z);
    const double l2 = std::log(l1);
    w = l1 - l2 + l2 / l1;
  }

  for (int it = 0; it < 64; ++it) {
    const double ew = std::exp(w);
    const double f = w * ew - z;
    const double wp1 = w + 1.0;
    if (wp1 == 0.0) break;
    const double denom = ew * wp1 - (w + 2.0) * f / (2.0 * wp1);
    const double step = f / denom;
    w -= step;
    if (w < -1.0) w = -1.0;
    if (std::abs(step) <= 2.0 * std::numeric_limits<double>::epsilon() * (1.0 + std::abs(w))) {
      break;
    }
  }
  return w;
}

double find_root_bracketed(const std::function<double(double)>& f,
                           const std::function<double(double)>& df, double lo, double hi,
                           double abs_tol, double residual_tol, int max_iter) {
  if (!(lo < hi)) throw InvalidArgument("find_root_bracketed: bracket must satisfy lo < hi");
  double f_lo = f(lo);
  double f_hi = f(hi);
  if (f_lo == 0.0) return lo;
  if (f_hi == 0.0) return hi;
  if ((f_lo > 0.0) == (f_hi > 0.0)) {
    throw NumericalError("find_root_bracketed: no sign change on the bracket");
  }
  double x = 0.5 * (lo + hi);
  for (int it = 0; it < max_iter; ++it) {
    const double fx = f(x);
    if (!std::isfinite(fx)) throw NumericalError("find_root_bracketed: non-finite residual");
    if (std::abs(fx) <= residual_tol) return x;
    if ((fx > 0.0) == (f_lo > 0.0)) {
      lo = x;
      f_lo = fx;
    } else {
      hi = x;
      f_hi = fx;
    }
    if (hi - lo <= abs_tol) return 0.5 * (lo + hi);
    const double slope = df ? df(x) : 0.0;
    double next = (slope != 0.0 && std::isfinite(slope)) ? x - fx / slope : lo - 1.0;
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    if (next == x) return x;
    x = next;
  }
  throw NumericalError("find_root_bracketed: no convergence within " + std::to_string(max_iter) +
                       " iterations");
}

double integrate_1d(const std::function<double(double)>& f, double a, double b,
                    const SolverConfig& cfg) {
  cfg.validate();
  if (a == b) return 0.0;
  if (a > b) return -integrate_1d(f, b, a, cfg);
  // Boost's local error estimate is not scaled by the interval length, so a
  // very short interval would never meet a relative tolerance. Integrating the
  // affinely mapped integrand over [-1, 1] keeps estimate and error comparable.
  const double mid = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  auto mapped = [&](double t) { return half * f(mid + half * t); };
  double error = 0.0, l1 = 0.0;
  const unsigned max_depth = static_cast<unsigned>(std::clamp(cfg.max_iter, 1, 15));
  const double value = boost::math::quadrature::gauss_kronrod<double, 15>::integrate(
      mapped, -1.0, 1.0, max_depth, cfg.rel_tol, &error, &l1);
  if (!std::isfinite(value)) throw NumericalError("integrate_1d: non-finite integral");
  // Relative to the L1 norm of the integrand, so cancelling integrals near
  // zero are not held to an unreachable tolerance.
  if (error > std::max(cfg.abs_tol, cfg.rel_tol * l1)) {
    throw NumericalError("integrate_1d: error estimate " + std::to_string(error) +
                         " exceeds tolerance");
  }
  return value;
}

}  // namespace coherence::numerics
