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


#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "cli/commands.hpp"
#include "cli/config.hpp"
#include "coherence/io.hpp"
#include "coherence/thermo.hpp"
#include "support/oracles.hpp"

using namespace coherence;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("coherence_engine_test_" + name);
  fs::remove_all(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

json base_doc() {
  return json::parse(R"({"system": {"omega": 1.0}, "bath": {"beta": 1.0, "alignment": 1.0}})");
}

struct CliRun {
  int code;
  std::string out, err;
};

CliRun invoke(std::vector<std::string> args) {
  args.insert(args.begin(), "coherence-engine");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = cli::run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

fs::path write_config(const fs::path& dir, const json& doc) {
  fs::create_directories(dir);
  const fs::path p = dir / "config.json";
  std::ofstream(p) << doc.dump(2);
  return p;
}

}  // namespace

TEST_SUITE("io") {

TEST_CASE("number formatting") {
  CHECK(io::format_double(0.1) == "0.10000000000000001");
  CHECK(io::format_double(-0.0) == "0");
  CHECK(io::format_double(1.0) == "1");
  oracle::StateSampler s(12);
  for (int n = 0; n < 200; ++n) {
    const double v = s.uniform(-1e3, 1e3) * std::pow(10.0, s.uniform(-20, 20));
    CHECK(std::stod(io::format_double(v)) == v);
  }
}

TEST_CASE("density matrix JSON round trip is exact") {
  oracle::StateSampler s(13);
  for (int n = 0; n < 50; ++n) {
    const DensityMatrix rho(s.any());
    const json j = json::parse(io::density_to_json(rho).dump());
    CHECK((io::density_from_json(j).matrix() - rho.matrix()).cwiseAbs().maxCoeff() == 0.0);
  }
  CHECK_THROWS(io::density_from_json(json::parse("[[1, 0], [0, 1]]")));
}

TEST_CASE("ledger serialization") {
  const DensityMatrix rho0 = steady_state(DegenerateSystem(1.0), BathSpec(1.0, RateProfile::constant(1.0), 1.0),
                                          CoherenceVector{});
  const Protocol2Result r = protocol2(GeneralInitialState::from_density(rho0), 1.0,
                                      BathSpec(1.0, RateProfile::constant(1.0), 1.0));
  const json j = io::ledger_to_json(r.ledger);
  CHECK(j.at("steps").size() == r.ledger.steps.size());
  CHECK(j.at("steps")[0].at("label") == "rotate");
  const std::string csv = io::ledger_to_csv(r.ledger);
  CHECK(csv.rfind("step,label,work_in,work_out,coherence_before,coherence_after\n", 0) == 0);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == static_cast<long>(r.ledger.steps.size()) + 1);
}

TEST_CASE("trajectory rows match the header") {
  const std::string header = io::trajectory_csv_header();
  const std::string row = io::trajectory_csv_row(0.5, DensityMatrix::diagonal(0.2, 0.3, 0.5));
  CHECK(std::count(header.begin(), header.end(), ',') == std::count(row.begin(), row.end(), ','));
  CHECK(row.rfind("0.5,", 0) == 0);
}

}  // TEST_SUITE

TEST_SUITE("cli") {

TEST_CASE("config: unknown keys are rejected with their location") {
  json doc = base_doc();
  doc["bath"]["temperature"] = 1.0;
  try {
    cli::parse_config(cli::Command::steady, doc);
    FAIL("expected ConfigError");
  } catch (const cli::ConfigError& e) {
    CHECK(e.path() == "/bath/temperature");
  }
  json doc2 = base_doc();
  doc2["task"] = {{"t_finall", 3.0}};
  CHECK_THROWS_AS(cli::parse_config(cli::Command::evolve, doc2), cli::ConfigError);
  json doc3 = base_doc();
  doc3["extra"] = 1;
  CHECK_THROWS_AS(cli::parse_config(cli::Command::evolve, doc3), cli::ConfigError);
}

TEST_CASE("config: defaults, overrides and hash") {
  const cli::ExperimentConfig c = cli::parse_config(cli::Command::evolve, base_doc());
  CHECK(c.task.at("t_final") == 200.0);
  CHECK(c.output.prefix == "evolve");

  cli::Overrides o;
  o.beta = 2.0;
  o.omega = 1.5;
  o.out = "elsewhere";
  const cli::ExperimentConfig c2 = cli::parse_config(cli::Command::evolve, cli::apply_overrides(base_doc(), o));
  CHECK(c2.bath.beta() == 2.0);
  CHECK(c2.system.omega1 == 1.5);
  CHECK(c2.output.dir == "elsewhere");
  CHECK(c2.hash != c.hash);

  cli::Overrides only_out;
  only_out.out = "a/different/place";
  const cli::ExperimentConfig c3 = cli::parse_config(cli::Command::evolve, cli::apply_overrides(base_doc(), only_out));
  CHECK(c3.hash == c.hash);
  CHECK(cli::parse_config(cli::Command::steady, base_doc()).hash != c.hash);
  CHECK(cli::fnv1a("") == 0xcbf29ce484222325ULL);
  CHECK(cli::fnv1a("a") == 0xaf63dc4c8601ec8cULL);
}

TEST_CASE("config: subcommand preconditions") {
  json split = base_doc();
  split["system"] = {{"omega1", 1.0}, {"omega2", 1.05}};
  CHECK_THROWS_AS(cli::parse_config(cli::Command::protocol1, split), cli::ConfigError);
  json misaligned = base_doc();
  misaligned["bath"]["alignment"] = 0.5;
  CHECK_THROWS_AS(cli::parse_config(cli::Command::protocol1, misaligned), cli::ConfigError);
  CHECK_THROWS_AS(cli::parse_config(cli::Command::figure_wfed, base_doc()), cli::ConfigError);
  json neg = base_doc();
  neg["bath"]["beta"] = -1.0;
  CHECK_THROWS(cli::parse_config(cli::Command::steady, neg));
}

TEST_CASE("run_experiment output is byte-identical across runs and job counts") {
  json doc = base_doc();
  doc["task"] = {{"betas", {0.3, 0.6, 1.0, 1.7, 2.5}}};
  const fs::path d1 = scratch("det1"), d2 = scratch("det2");
  doc["output"] = {{"dir", d1.string()}};
  const auto a = cli::run_experiment(cli::parse_config(cli::Command::figure_wfed, doc), {1});
  doc["output"] = {{"dir", d2.string()}};
  const auto b = cli::run_experiment(cli::parse_config(cli::Command::figure_wfed, doc), {4});
  REQUIRE(a.files.size() == b.files.size());
  for (std::size_t k = 0; k < a.files.size(); ++k) {
    CHECK(slurp(a.files[k]) == slurp(b.files[k]));
  }
  const std::string csv = slurp(a.files[0]);
  CHECK(csv.rfind("# coherence-engine", 0) == 0);
  CHECK(csv.find("beta,w_protocol1,fed\n") != std::string::npos);
  CHECK(a.summary.at("w_not_above_fed") == true);
  CHECK(a.summary.at("w_strictly_decreasing") == true);
  CHECK(a.summary.at("fed_strictly_decreasing") == true);
  for (const auto& row : a.summary.at("rows")) {
    const double beta = row.at("beta").get<double>();
    const double f = std::log((1 + 2 * std::exp(-beta)) / (1 + std::exp(-beta))) / beta;
    CHECK(row.at("fed").get<double>() == doctest::Approx(f).epsilon(1e-13));
  }
}

TEST_CASE("cli: protocol runs") {
  const fs::path dir = scratch("p1");
  json doc = base_doc();
  doc["task"] = {{"max_rounds", 1}};
  const CliRun r = invoke({"protocol1", "-c", write_config(dir, doc).string(), "--out", (dir / "out").string()});
  REQUIRE(r.code == 0);
  const json s = json::parse(r.out);
  CHECK(s.at("total_work").get<double>() == doctest::Approx(0.0904).epsilon(1e-3));
  CHECK(s.at("stop_reason") == "max_rounds");
  CHECK(fs::exists(dir / "out" / "protocol1_rounds.csv"));

  const CliRun r2 = invoke({"protocol2", "-c", write_config(dir, base_doc()).string(), "--out", (dir / "out2").string()});
  REQUIRE(r2.code == 0);
  CHECK(json::parse(r2.out).at("abs_net_minus_fed").get<double>() < 1e-10);
}

TEST_CASE("cli: exit codes and diagnostics") {
  const fs::path dir = scratch("codes");
  json doc = base_doc();
  doc["bath"]["colour"] = "blue";
  const CliRun bad = invoke({"steady", "-c", write_config(dir, doc).string()});
  CHECK(bad.code == cli::ExitCode::config_failure);
  const json diag = json::parse(bad.err);
  CHECK(diag.at("error") == "config");
  CHECK(diag.at("path") == "/bath/colour");

  CHECK(invoke({"steady", "-c", (dir / "missing.json").string()}).code != 0);
  CHECK(invoke({"no-such-command"}).code != 0);

  json unstable = base_doc();
  unstable["task"] = {{"method", "rk4"}, {"fixed_step", 5.0}};
  const CliRun num = invoke({"evolve", "-c", write_config(dir, unstable).string(), "--out", (dir / "o").string()});
  CHECK(num.code == cli::ExitCode::numerical_failure);
  CHECK(json::parse(num.err).at("error") == "numerical");
  CHECK_FALSE(fs::exists(dir / "o" / "evolve_trajectory.csv"));
}

TEST_CASE("cli: flag overrides reach the run") {
  const fs::path dir = scratch("flags");
  const CliRun r = invoke({"steady", "-c", write_config(dir, base_doc()).string(), "--beta", "2", "--alignment", "0.5",
                        "--out", (dir / "o").string()});
  REQUIRE(r.code == 0);
  const json s = json::parse(r.out);
  const json cfg = json::parse(slurp(dir / "o" / "steady_steady.json")).at("meta").at("config");
  CHECK(cfg.at("bath").at("beta") == 2.0);
  CHECK(cfg.at("bath").at("alignment") == 0.5);
  CHECK(s.at("meta").at("config_hash").get<std::string>().size() == 16);
}

}  // TEST_SUITE
