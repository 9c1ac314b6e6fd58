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

#include "coherence/thermo.hpp"

#include <algorithm>
#include <cmath>

#include "coherence/errors.hpp"

namespace coherence {

namespace {

double xlogx(double v) { return v < 1e-300 ? 0.0 : v * std::log(v); }

void require_beta(double beta) {
  if (!(beta > 0.0) || !std::isfinite(beta)) {
    throw InvalidArgument("inverse temperature beta must be positive and finite");
  }
}

}  // namespace

Matrix3c HamiltonianSpec::matrix() const {
  Matrix3c m = Matrix3c::Zero();
  m(0, 0) = e2;
  m(1, 1) = e1;
  return m;
}

double l1_coherence(const DensityMatrix& rho) {
  const Matrix3c& m = rho.matrix();
  double sum = 0.0;
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) {
      if (i != j) sum += std::abs(m(i, j));
    }
  }
  return sum;
}

EigenTriple eigen_subspace(const DensityMatrix& rho) {
  const Matrix3c& m = rho.matrix();
  const int g = index_of(Level::ground);
  for (int e : {index_of(Level::two), index_of(Level::one)}) {
    if (std::abs(m(e, g)) > 1e-12 || std::abs(m(g, e)) > 1e-12) {
      throw InvalidArgument("eigen_subspace: state has ground-excited coherence");
    }
  }
  const double r22 = m(0, 0).real();
  const double r11 = m(1, 1).real();
  const double mod12 = std::abs(m(1, 0));
  const double root = std::hypot(r11 - r22, 2.0 * mod12);
  return {1.0 - r11 - r22, 0.5 * (r11 + r22 + root), 0.5 * (r11 + r22 - root)};
}

double von_neumann_entropy(const DensityMatrix& rho) {
  const Matrix3c herm = 0.5 * (rho.matrix() + rho.matrix().adjoint());
  const Eigen::SelfAdjointEigenSolver<Matrix3c> es(herm, Eigen::EigenvaluesOnly);
  double s = 0.0;
  for (int k = 0; k < 3; ++k) s -= xlogx(es.eigenvalues()(k));
  return s;
}

double free_energy(const DensityMatrix& rho, const HamiltonianSpec& h, double beta) {
  require_beta(beta);
  const double energy = (rho.matrix() * h.matrix()).trace().real();
  return energy - von_neumann_entropy(rho) / beta;
}

DensityMatrix gibbs(const HamiltonianSpec& h, double beta) {
  if (!(beta >= 0.0)) throw InvalidArgument("gibbs: beta must be >= 0");
  const double w2 = std::exp(-beta * h.e2);
  const double w1 = std::exp(-beta * h.e1);
  const double z = 1.0 + w1 + w2;
  return DensityMatrix::diagonal(w2 / z, w1 / z, 1.0 / z);
}

double fed(const DensityMatrix& rho, const HamiltonianSpec& h, double beta) {
  require_beta(beta);
  // F(gamma) = -ln Z / beta exactly; avoids an eigen-solve of the Gibbs state.
  const double log_z = std::log(1.0 + std::exp(-beta * h.e1) + std::exp(-beta * h.e2));
  return free_energy(rho, h, beta) + log_z / beta;
}

double fed_subspace(const DensityMatrix& rho, double omega, double beta) {
  require_beta(beta);
  const EigenTriple l = eigen_subspace(rho);
  const double excited = rho.population(Level::one) + rho.population(Level::two);
  const double neg_entropy = xlogx(l.lambda0) + xlogx(l.lambda_plus) + xlogx(l.lambda_minus);
  return omega * excited + (neg_entropy + std::log(1.0 + 2.0 * std::exp(-beta * omega))) / beta;
}

}  // namespace coherence
