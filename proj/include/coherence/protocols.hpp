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

#include <optional>
#include <string>
#include <vector>

#include "coherence/bath.hpp"
#include "coherence/bloch.hpp"
#include "coherence/dynamics.hpp"
#include "coherence/numerics.hpp"

namespace coherence {

struct LedgerStep {
  std::string label;
  DensityMatrix state_before;
  DensityMatrix state_after;
  double work_in = 0.0;   // energy spent on the system, >= 0
  double work_out = 0.0;  // energy extracted, >= 0
  double coherence_before = 0.0;
  double coherence_after = 0.0;
};

struct ProtocolLedger {
  std::vector<LedgerStep> steps;

  /// sum(work_out - work_in).
  double net_work() const;
  void append(const ProtocolLedger& other);
};

/// rho_S with ground population b and excited block ((1 - b)/2)(I + n . sigma),
/// n = |n| (sin theta cos phi, sin theta sin phi, cos theta); sigma_z = +1 on |2>.
struct GeneralInitialState {
  double b = 1.0;
  double n_norm = 0.0;
  double theta = 0.0;
  double phi = 0.0;

  DensityMatrix density() const;
  /// Polar decomposition of a state without ground-excited coherence. |n| = 0
  /// yields theta = pi, for which the rotation is diagonal.
  static GeneralInitialState from_density(const DensityMatrix& rho);
  /// Rejects b outside [0, 1] or |n| outside [0, 1].
  void validate() const;
};

/// Energy-preserving rotation of the excited block,
///   [[-sin(theta/2), e^{-i phi} cos(theta/2)], [e^{i phi} cos(theta/2), sin(theta/2)]].
/// It maps the +n eigenvector of the excited block onto |1>.
Matrix3c coherence_unitary(double theta, double phi);

/// (1/sqrt 2) [[1, -1], [1, 1]] on the excited block, used by the repeated protocol.
Matrix3c protocol1_unitary();

/// One round of the repeated protocol: lift |2> by `shift`, so that the lifted
/// level is omega + shift and Z = 1 + e^{-beta omega} + e^{-beta (omega + shift)}.
struct RoundPlan {
  int index = 1;
  double shift = 0.0;
  double lifted_level = 0.0;
  double partition = 0.0;

  static RoundPlan make(int index, double shift, double omega, double beta);
};

struct RoundOptions {
  /// Replace the two infinite-time thermalizations by integration for
  /// thermalization_time.
  bool finite_time = false;
  double thermalization_time = 50.0;
  EvolveOptions evolve{};
};

struct RoundResult {
  ProtocolLedger ledger;
  DensityMatrix final_state;
  RoundPlan plan;
  double lift_work = 0.0;       // spent raising |2>
  double extracted_work = 0.0;  // recovered lowering |2>
  double net_work() const { return extracted_work - lift_work; }
};

/// Steps: rotate, lift |2>, thermalize with the lifted level (independent
/// channels), lower |2> in isolation, re-thermalize under the aligned
/// dissipator. Rejects shift <= 0 and baths with p != 1.
RoundResult protocol1_round(const DensityMatrix& state, double omega, double shift,
                            const BathSpec& bath, int round_index = 1,
                            const RoundOptions& opts = {});

/// Net work of a round, shift * (e^{-beta Omega} / Z - p2), where p2 is the |2>
/// population right after the rotation.
double protocol1_round_work(double shift, double p2, double omega, double beta);

/// Shift maximizing the first round (p2 = 0): (1/beta) [1 + W0(1 / ((1 + e^{beta omega}) e))].
double optimal_shift_round1(double beta, double omega);

/// Largest shift with non-negative round work for a given p2:
/// (1/beta) ln[x (1 - p2) / (p2 (1 + x))], x = e^{-beta omega}. Infinite when p2 = 0.
double shift_upper_bound(double p2, double omega, double beta);

/// |2> population after rotating the final state of a round run with `prev`.
double rotated_upper_population(const RoundPlan& prev, double omega, double beta);

struct ShiftChoice {
  double shift = 0.0;
  double upper_bound = 0.0;
  /// Residual of Z^2 - Z R e^{-beta Omega} + shift beta (1 + x) R e^{-beta Omega}
  /// at the returned shift, R = 1/p2.
  double residual = 0.0;
  bool interior = false;     // 0 < shift < upper_bound
  bool is_maximum = false;   // local maximum of the round work
  bool stationary = false;   // false if the fallback maximizer was used
};

/// Optimal shift for a round starting from |2> population p2 > 0. Root of the
/// stationarity condition in (0, upper bound) by safeguarded Newton; the root
/// is then checked to be an interior maximum, and if it is not, a bounded
/// golden-section maximizer is used instead (and a warning logged). nullopt
/// when no positive shift yields positive work.
std::optional<ShiftChoice> optimal_shift_for(double p2, double omega, double beta);

/// Optimal shift for round prev.index + 1 after a round run with `prev`.
std::optional<ShiftChoice> optimal_shift_next(const RoundPlan& prev, double beta, double omega);

struct StopRule {
  int max_rounds = 1000;
  double shift_floor = 1e-6;
};

struct RoundSummary {
  RoundPlan plan;
  ShiftChoice choice;
  double lift_work = 0.0;
  double extracted_work = 0.0;
  double net_work = 0.0;
  double coherence_after = 0.0;
};

struct Protocol1Result {
  ProtocolLedger ledger;
  std::vector<RoundSummary> rounds;
  DensityMatrix final_state;
  double total_work = 0.0;
  /// "shift_floor", "max_rounds" or "no_admissible_shift".
  std::string stop_reason;
};

/// Repeats optimally-shifted rounds until the next shift falls below the
/// floor, no admissible shift remains, or max_rounds is reached.
Protocol1Result run_protocol1(const DensityMatrix& initial, double omega, const BathSpec& bath,
                              const StopRule& stop = {}, const RoundOptions& opts = {});

enum class WorkEvaluation { closed_form, quadrature };

struct Protocol2Result {
  ProtocolLedger ledger;
  /// Matched levels; omega2 is +infinity when |n| = 1 (and omega1 when b = 1).
  double omega1 = 0.0;
  double omega2 = 0.0;
  double w1 = 0.0, w1_prime = 0.0, w2 = 0.0, w2_prime = 0.0;
  double net_work = 0.0;
  double fed = 0.0;  // of the initial state, for comparison
};

/// Single-shot cycle: rotate, match levels in isolation, sweep |2> down to
/// omega1 isothermally, lift both levels back to omega isothermally.
/// Rejects b = 0.
Protocol2Result protocol2(const GeneralInitialState& init, double omega, const BathSpec& bath,
                          WorkEvaluation eval = WorkEvaluation::closed_form,
                          const numerics::SolverConfig& quad = {});

enum class SweepMode {
  single_level,  // one excited level moves, the other stays at fixed_other_level
  both_levels,   // both excited levels move together
};

/// Work extracted (positive) by an isothermal quasistatic sweep of the moving
/// level(s) from omega_from to omega_to. Endpoints may be +infinity.
double quasistatic_work(double beta, double omega_from, double omega_to, double fixed_other_level,
                        SweepMode mode);

/// The same integral evaluated by adaptive quadrature.
double quasistatic_work_quadrature(double beta, double omega_from, double omega_to,
                                   double fixed_other_level, SweepMode mode,
                                   const numerics::SolverConfig& cfg = {});

/// Staircase approximation: N equal isolated level shifts, each followed by
/// full thermalization. Converges to quasistatic_work with error O(1/N).
double discretized_quasistatic(double beta, double omega_from, double omega_to,
                               double fixed_other_level, int steps,
                               SweepMode mode = SweepMode::single_level);

}  // namespace coherence
