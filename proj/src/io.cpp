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

#include "coherence/io.hpp"

#include <charconv>
#include <sstream>

#include "coherence/errors.hpp"
#include "coherence/thermo.hpp"

namespace coherence::io {

std::string format_double(double v) {
  if (v == 0.0) return "0";  // also folds -0
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 17);
  return std::string(buf, res.ptr);
}

nlohmann::json density_to_json(const DensityMatrix& rho) {
  nlohmann::json rows = nlohmann::json::array();
  for (int i = 0; i < 3; ++i) {
    nlohmann::json row = nlohmann::json::array();
    for (int j = 0; j < 3; ++j) {
      const Complex z = rho.matrix()(i, j);
      row.push_back({z.real(), z.imag()});
    }
    rows.push_back(row);
  }
  return rows;
}

DensityMatrix density_from_json(const nlohmann::json& j) {
  if (!j.is_array() || j.size() != 3) throw InvalidArgument("density matrix: expected 3 rows");
  Matrix3c m;
  for (int i = 0; i < 3; ++i) {
    const auto& row = j[static_cast<std::size_t>(i)];
    if (!row.is_array() || row.size() != 3) {
      throw InvalidArgument("density matrix: expected 3 entries per row");
    }
    for (int k = 0; k < 3; ++k) {
      const auto& z = row[static_cast<std::size_t>(k)];
      if (!z.is_array() || z.size() != 2 || !z[0].is_number() || !z[1].is_number()) {
        throw InvalidArgument("density matrix: entries must be [re, im] number pairs");
      }
      m(i, k) = {z[0].get<double>(), z[1].get<double>()};
    }
  }
  return DensityMatrix(m);
}

nlohmann::json ledger_to_json(const ProtocolLedger& ledger) {
  nlohmann::json steps = nlohmann::json::array();
  for (const auto& s : ledger.steps) {
    steps.push_back({{"label", s.label},
                     {"work_in", s.work_in},
                     {"work_out", s.work_out},
                     {"coherence_before", s.coherence_before},
                     {"coherence_after", s.coherence_after},
                     {"state", density_to_json(s.state_after)}});
  }
  return {{"steps", steps}, {"net_work", ledger.net_work()}};
}

std::string ledger_to_csv(const ProtocolLedger& ledger) {
  std::ostringstream out;
  out << "step,label,work_in,work_out,coherence_before,coherence_after\n";
  for (std::size_t i = 0; i < ledger.steps.size(); ++i) {
    const auto& s = ledger.steps[i];
    out << i << ',' << s.label << ',' << format_double(s.work_in) << ','
        << format_double(s.work_out) << ',' << format_double(s.coherence_before) << ','
        << format_double(s.coherence_after) << '\n';
  }
  return out.str();
}

std::string trajectory_csv_header() {
  static const char* names[3] = {"2", "1", "0"};
  std::string h = "t";
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) {
      const std::string entry = std::string("rho") + names[i] + names[j];
      h += "," + entry + "_re," + entry + "_im";
    }
  }
  return h + ",l1_coherence,min_eigenvalue";
}

std::string trajectory_csv_row(double t, const DensityMatrix& rho) {
  std::string row = format_double(t);
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) {
      const Complex z = rho.matrix()(i, j);
      row += ',' + format_double(z.real()) + ',' + format_double(z.imag());
    }
  }
  row += ',' + format_double(l1_coherence(rho)) + ',' + format_double(min_eigenvalue(rho));
  return row;
}

}  // namespace coherence::io
