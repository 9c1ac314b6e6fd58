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

#include <string>

#include <nlohmann/json.hpp>

#include "coherence/bloch.hpp"
#include "coherence/dynamics.hpp"
#include "coherence/protocols.hpp"

namespace coherence::io {

/// 17 significant digits, '.' decimal point regardless of locale.
std::string format_double(double v);

/// Nested rows of [re, im] pairs in basis order (|2>, |1>, |0>).
nlohmann::json density_to_json(const DensityMatrix& rho);
DensityMatrix density_from_json(const nlohmann::json& j);

nlohmann::json ledger_to_json(const ProtocolLedger& ledger);

/// One row per step: label, work_in, work_out, coherence_before, coherence_after.
std::string ledger_to_csv(const ProtocolLedger& ledger);

/// Columns t, re/im of the nine entries (row-major), l1 coherence, min eigenvalue.
std::string trajectory_csv_header();
std::string trajectory_csv_row(double t, const DensityMatrix& rho);

}  // namespace coherence::io
