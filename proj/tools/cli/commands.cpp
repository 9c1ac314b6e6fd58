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


#include "commands.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <limits>
#include <sstream>
#include <thread>

#include <CLI11.hpp>

#include "coherence/diagnostics.hpp"
#include "coherence/errors.hpp"
#include "coherence/io.hpp"
#include "coherence/neardegen.hpp"
#include "coherence/thermo.hpp"

namespace coherence::cli {

using nlohmann::json;
using io::format_double;

namespace {

constexpr const char* kTool = "coherence-engine";

// JSON has no infinities; spell them out instead of letting them become null.
json num(double v) {
  if (std::isfinite(v)) return v;
  if (std::isnan(v)) return "nan";
  return v > 0 ? "inf" : "-inf";
}

json meta(const ExperimentConfig& cfg) {
  return {{"tool", kTool},
          {"version", COHERENCE_ENGINE_VERSION},
          {"command", std::string(command_name(cfg.command))},
          {"config_hash", hash_hex(cfg.hash)},
          {"config", [&] {
             json c = cfg.effective;
             c.erase("output");
             return c;
           }()}};
}

std::string csv_banner(const ExperimentConfig& cfg) {
  return std::string("# ") + kTool + " " + COHERENCE_ENGINE_VERSION + " " +
         std::string(command_name(cfg.command)) + " config_hash=" + hash_hex(cfg.hash) + "\n";
}

class Writer {
 public:
  explicit Writer(const ExperimentConfig& cfg) : cfg_(cfg) {
    std::error_code ec;
    std::filesystem::create_directories(cfg.output.dir, ec);
    if (ec) throw std::runtime_error("cannot create output directory '" + cfg.output.dir + "': " + ec.message());
  }

  void csv(const std::string& suffix, const std::string& body) {
    write(suffix + ".csv", csv_banner(cfg_) + body);
  }
  void json_file(const std::string& suffix, json doc) {
    doc["meta"] = meta(cfg_);
    write(suffix + ".json", doc.dump(2) + "\n");
  }
  const std::vector<std::string>& files() const { return files_; }

 private:
  void write(const std::string& name, const std::string& content) {
    const auto path = (std::filesystem::path(cfg_.output.dir) / (cfg_.output.prefix + "_" + name)).string();
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    f << content;
    f.close();
    if (!f) throw std::runtime_error("cannot write '" + path + "'");
    files_.push_back(path);
  }

  const ExperimentConfig& cfg_;
  std::vector<std::string> files_;
};

// Each index writes only its own slot; slots are read back in index order,
// so the result does not depend on the number of workers.
void parallel_for(std::size_t n, unsigned jobs, const std::function<void(std::size_t)>& fn) {
  if (jobs == 0) jobs = std::max(1u, std::thread::hardware_concurrency());
  jobs = static_cast<unsigned>(std::min<std::size_t>(jobs, std::max<std::size_t>(n, 1)));
  std::vector<std::exception_ptr> errors(n);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < n; i = next++) {
      try {
        fn(i);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  if (jobs <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (unsigned k = 0; k < jobs; ++k) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

EvolveOptions evolve_options(const json& task) {
  EvolveOptions o;
  o.abs_tol = task.at("abs_tol").get<double>();
  o.rel_tol = task.at("rel_tol").get<double>();
  o.method = task.at("method") == "rk4" ? numerics::OdeMethod::fixed_rk4 : numerics::OdeMethod::dopri5;
  o.fixed_step = task.at("fixed_step").get<double>();
  return o;
}

InitialSpec initial_or(const ExperimentConfig& cfg, InitialSpec::Kind fallback) {
  if (cfg.initial) return *cfg.initial;
  InitialSpec s;
  s.kind = fallback;
  return s;
}

DensityMatrix gibbs_degenerate(double omega, double beta) {
  return gibbs(HamiltonianSpec::degenerate(omega), beta);
}

RunOutcome cmd_evolve(const ExperimentConfig& cfg, Writer& w) {
  const DegenerateSystem sys(cfg.system.omega1);
  const DensityMatrix rho0 = resolve_initial(initial_or(cfg, InitialSpec::Kind::ground), cfg.system, cfg.bath);
  const double t_final = cfg.task.at("t_final").get<double>();
  const long samples = cfg.task.at("samples").get<long>();

  std::vector<double> times;
  if (t_final == 0.0 || samples == 1) {
    times.push_back(t_final);
  } else {
    for (long k = 0; k < samples; ++k) {
      times.push_back(k == samples - 1 ? t_final : t_final * static_cast<double>(k) / static_cast<double>(samples - 1));
    }
  }
  const Trajectory traj = evolve_trajectory(rho0, sys, cfg.bath, times, evolve_options(cfg.task));

  const bool aligned = cfg.bath.alignment() == 1.0;
  const CoherenceVector init = CoherenceVector::from_density(rho0);
  double max_dev = 0.0, max_drift = 0.0, min_eig = std::numeric_limits<double>::infinity();
  std::string body = io::trajectory_csv_header() + "\n";
  for (std::size_t k = 0; k < traj.states.size(); ++k) {
    const DensityMatrix& rho = traj.states[k];
    body += io::trajectory_csv_row(traj.times[k], rho) + "\n";
    max_drift = std::max(max_drift, std::abs(rho.trace() - Complex(1.0, 0.0)));
    min_eig = std::min(min_eig, min_eigenvalue(rho));
    if (aligned) {
      const DensityMatrix exact = analytic_evolution_aligned(init, sys, cfg.bath, traj.times[k]).to_density();
      max_dev = std::max(max_dev, (exact.matrix() - rho.matrix()).cwiseAbs().maxCoeff());
    }
    // An unstable fixed step does not fail inside the integrator, it just
    // produces garbage; refuse to write it.
    if (!(max_drift <= 1e-6) || !(min_eig >= -1e-6)) {
      throw NumericalError("evolve: state left the physical set (trace drift " + io::format_double(max_drift) +
                               ", min eigenvalue " + io::format_double(min_eig) + "); reduce fixed_step",
                           traj.times[k]);
    }
  }
  w.csv("trajectory", body);

  const DensityMatrix& last = traj.states.back();
  const double td = trace_distance(last, gibbs_degenerate(sys.omega, cfg.bath.beta()));
  const double tol = cfg.task.at("gibbs_tolerance").get<double>();
  json summary = {{"t_final", t_final},
                  {"samples", traj.states.size()},
                  {"integrator_steps", traj.steps},
                  {"final_state", io::density_to_json(last)},
                  {"final_l1_coherence", l1_coherence(last)},
                  {"trace_distance_to_gibbs", td},
                  {"gibbs_tolerance", tol},
                  {"reached_gibbs", td < tol},
                  {"analytic_max_deviation", aligned ? json(max_dev) : json(nullptr)},
                  {"max_trace_drift", max_drift},
                  {"min_eigenvalue", min_eig}};
  w.json_file("summary", summary);
  return {summary, {}};
}

RunOutcome cmd_steady(const ExperimentConfig& cfg, Writer& w) {
  const DegenerateSystem sys(cfg.system.omega1);
  const DensityMatrix rho0 = resolve_initial(initial_or(cfg, InitialSpec::Kind::ground), cfg.system, cfg.bath);
  const DensityMatrix rho = steady_state(sys, cfg.bath, CoherenceVector::from_density(rho0));
  const HamiltonianSpec h = HamiltonianSpec::degenerate(sys.omega);
  json summary = {{"state", io::density_to_json(rho)},
                  {"l1_coherence", l1_coherence(rho)},
                  {"fed", fed(rho, h, cfg.bath.beta())},
                  {"trace_distance_to_gibbs", trace_distance(rho, gibbs(h, cfg.bath.beta()))},
                  {"min_eigenvalue", min_eigenvalue(rho)}};
  w.json_file("steady", summary);
  return {summary, {}};
}

Protocol1Result protocol1_from(const ExperimentConfig& cfg, const BathSpec& bath, DensityMatrix* start) {
  const DensityMatrix rho0 = resolve_initial(initial_or(cfg, InitialSpec::Kind::steady), cfg.system, bath);
  if (start) *start = rho0;
  StopRule stop;
  stop.max_rounds = static_cast<int>(cfg.task.at("max_rounds").get<long>());
  stop.shift_floor = cfg.task.at("shift_floor").get<double>();
  RoundOptions ro;
  ro.finite_time = cfg.task.at("finite_time").get<bool>();
  ro.thermalization_time = cfg.task.at("thermalization_time").get<double>();
  return run_protocol1(rho0, cfg.system.omega1, bath, stop, ro);
}

RunOutcome cmd_protocol1(const ExperimentConfig& cfg, Writer& w) {
  DensityMatrix rho0;
  const Protocol1Result r = protocol1_from(cfg, cfg.bath, &rho0);
  const double beta = cfg.bath.beta();
  const double omega = cfg.system.omega1;

  std::string csv = "round,shift,upper_bound,lift_work,extracted_work,net_work,coherence_after,residual,is_maximum\n";
  json rounds = json::array();
  for (const auto& s : r.rounds) {
    csv += std::to_string(s.plan.index) + ',' + format_double(s.plan.shift) + ',' +
           format_double(s.choice.upper_bound) + ',' + format_double(s.lift_work) + ',' +
           format_double(s.extracted_work) + ',' + format_double(s.net_work) + ',' +
           format_double(s.coherence_after) + ',' + format_double(s.choice.residual) + ',' +
           (s.choice.is_maximum ? "1" : "0") + "\n";
    rounds.push_back({{"round", s.plan.index},
                      {"shift", s.plan.shift},
                      {"upper_bound", num(s.choice.upper_bound)},
                      {"lift_work", s.lift_work},
                      {"extracted_work", s.extracted_work},
                      {"net_work", s.net_work},
                      {"coherence_after", s.coherence_after},
                      {"stationary", s.choice.stationary},
                      {"is_maximum", s.choice.is_maximum}});
  }
  w.csv("rounds", csv);

  const double td = trace_distance(r.final_state, gibbs_degenerate(omega, beta));
  json summary = {{"rounds", r.rounds.size()},
                  {"total_work", r.total_work},
                  {"stop_reason", r.stop_reason},
                  {"initial_fed", fed(rho0, HamiltonianSpec::degenerate(omega), beta)},
                  {"initial_l1_coherence", l1_coherence(rho0)},
                  {"final_l1_coherence", l1_coherence(r.final_state)},
                  {"final_trace_distance_to_gibbs", td}};
  json ledger = summary;
  ledger["round_summaries"] = rounds;
  ledger["ledger"] = io::ledger_to_json(r.ledger);
  ledger["final_state"] = io::density_to_json(r.final_state);
  w.json_file("ledger", ledger);
  return {summary, {}};
}

RunOutcome cmd_protocol2(const ExperimentConfig& cfg, Writer& w) {
  const InitialSpec spec = initial_or(cfg, InitialSpec::Kind::steady);
  const GeneralInitialState init =
      spec.kind == InitialSpec::Kind::general
          ? spec.general
          : GeneralInitialState::from_density(resolve_initial(spec, cfg.system, cfg.bath));
  const auto eval = cfg.task.at("evaluation") == "quadrature" ? WorkEvaluation::quadrature
                                                              : WorkEvaluation::closed_form;
  const Protocol2Result r = protocol2(init, cfg.system.omega1, cfg.bath, eval);
  w.csv("steps", io::ledger_to_csv(r.ledger));

  json summary = {{"evaluation", cfg.task.at("evaluation")},
                  {"omega1", num(r.omega1)},
                  {"omega2", num(r.omega2)},
                  {"w1", r.w1},
                  {"w1_prime", r.w1_prime},
                  {"w2", r.w2},
                  {"w2_prime", r.w2_prime},
                  {"net_work", r.net_work},
                  {"fed", r.fed},
                  {"abs_net_minus_fed", std::abs(r.net_work - r.fed)}};
  json ledger = summary;
  ledger["ledger"] = io::ledger_to_json(r.ledger);
  w.json_file("ledger", ledger);
  return {summary, {}};
}

bool strictly_decreasing(const std::vector<double>& v) {
  for (std::size_t i = 1; i < v.size(); ++i) {
    if (!(v[i] < v[i - 1])) return false;
  }
  return true;
}

RunOutcome cmd_figure_wfed(const ExperimentConfig& cfg, Writer& w, unsigned jobs) {
  const auto betas = cfg.task.at("betas").get<std::vector<double>>();
  const double omega = cfg.system.omega1;
  std::vector<double> work(betas.size()), feds(betas.size());
  std::vector<std::size_t> rounds(betas.size());
  parallel_for(betas.size(), jobs, [&](std::size_t i) {
    const BathSpec bath = cfg.bath.with_beta(betas[i]);
    DensityMatrix rho0;
    const Protocol1Result r = protocol1_from(cfg, bath, &rho0);
    work[i] = r.total_work;
    rounds[i] = r.rounds.size();
    feds[i] = fed(rho0, HamiltonianSpec::degenerate(omega), betas[i]);
  });

  std::string csv = "beta,w_protocol1,fed\n";
  bool positive = true, below = true;
  json rows = json::array();
  for (std::size_t i = 0; i < betas.size(); ++i) {
    csv += format_double(betas[i]) + ',' + format_double(work[i]) + ',' + format_double(feds[i]) + "\n";
    positive = positive && work[i] > 0.0 && feds[i] > 0.0;
    below = below && work[i] <= feds[i];
    rows.push_back({{"beta", betas[i]}, {"w_protocol1", work[i]}, {"fed", feds[i]}, {"rounds", rounds[i]}});
  }
  w.csv("wfed", csv);
  json summary = {{"rows", rows},
                  {"all_positive", positive},
                  {"w_not_above_fed", below},
                  {"w_strictly_decreasing", strictly_decreasing(work)},
                  {"fed_strictly_decreasing", strictly_decreasing(feds)}};
  w.json_file("summary", summary);
  return {summary, {}};
}

RunOutcome cmd_neardegen(const ExperimentConfig& cfg, Writer& w, unsigned jobs) {
  const double omega1 = cfg.system.omega1;
  std::vector<double> splittings;
  if (cfg.task.contains("relative_splittings")) {
    splittings = cfg.task.at("relative_splittings").get<std::vector<double>>();
  } else {
    splittings.push_back((cfg.system.omega2 - omega1) / omega1);
  }
  const DensityMatrix rho0 = resolve_initial(initial_or(cfg, InitialSpec::Kind::ground), cfg.system, cfg.bath);
  const CoherenceVector init = CoherenceVector::from_density(rho0);
  const double t_final = cfg.task.at("t_final").get<double>();
  const long samples = cfg.task.at("samples").get<long>();
  std::vector<double> times;
  for (long k = 0; k < samples; ++k) {
    times.push_back(t_final * static_cast<double>(k) / static_cast<double>(samples - 1));
  }
  EvolveOptions eo;
  eo.abs_tol = cfg.task.at("abs_tol").get<double>();
  eo.rel_tol = cfg.task.at("rel_tol").get<double>();

  std::vector<double> deltas(splittings.size()), err0(splittings.size()), err1(splittings.size());
  parallel_for(splittings.size(), jobs, [&](std::size_t i) {
    const double omega2 = cfg.task.contains("relative_splittings") ? omega1 * (1.0 + splittings[i])
                                                                   : cfg.system.omega2;
    const NearDegenerateSystem nd(omega1, omega2);
    deltas[i] = nd.delta();
    const auto traj = evolve_neardegenerate_trajectory(DressedCoherenceVector::from_coherence(init), nd,
                                                       cfg.bath, times, eo);
    double e0 = 0.0, e1 = 0.0;
    for (std::size_t k = 0; k < times.size(); ++k) {
      const auto& full = traj.states[k].pi;
      const auto zeroth = DressedCoherenceVector::from_coherence(
          analytic_evolution_aligned(init, nd.degenerate_limit(), cfg.bath, times[k]));
      const auto first = perturbative_solution(init, nd, cfg.bath, times[k]);
      e0 = std::max(e0, (full - zeroth.pi).cwiseAbs().maxCoeff());
      e1 = std::max(e1, (full - first.pi).cwiseAbs().maxCoeff());
    }
    err0[i] = e0;
    err1[i] = e1;
  });

  std::string csv = "relative_splitting,delta,max_error_zeroth_order,max_error_first_order\n";
  json rows = json::array();
  json ratios = json::array();
  for (std::size_t i = 0; i < splittings.size(); ++i) {
    csv += format_double(splittings[i]) + ',' + format_double(deltas[i]) + ',' + format_double(err0[i]) +
           ',' + format_double(err1[i]) + "\n";
    rows.push_back({{"relative_splitting", splittings[i]},
                    {"delta", deltas[i]},
                    {"max_error_zeroth_order", err0[i]},
                    {"max_error_first_order", err1[i]}});
    if (i > 0) ratios.push_back(num(err1[i - 1] / err1[i]));
  }
  w.csv("neardegen", csv);

  const NearDegenerateSystem flat(omega1, omega1);
  const auto dressed = neardegenerate_generator(flat, cfg.bath);
  const auto plain = coherence_generator(flat.degenerate_limit(), cfg.bath);
  const double reduction = std::max((dressed.m - plain.m.cast<Complex>()).cwiseAbs().maxCoeff(),
                                    (dressed.b - plain.b).cwiseAbs().maxCoeff());
  json summary = {{"rows", rows},
                  {"error_ratios", ratios},
                  {"delta_zero_generator_deviation", reduction}};
  w.json_file("summary", summary);
  return {summary, {}};
}

void diagnostic(std::ostream& err, const char* kind, const std::string& message, json extra = json::object()) {
  extra["error"] = kind;
  extra["message"] = message;
  err << extra.dump() << '\n';
}

}  // namespace

RunOutcome run_experiment(const ExperimentConfig& cfg, const RunOptions& opts) {
  Writer w(cfg);
  RunOutcome out;
  switch (cfg.command) {
    case Command::evolve: out = cmd_evolve(cfg, w); break;
    case Command::steady: out = cmd_steady(cfg, w); break;
    case Command::protocol1: out = cmd_protocol1(cfg, w); break;
    case Command::protocol2: out = cmd_protocol2(cfg, w); break;
    case Command::figure_wfed: out = cmd_figure_wfed(cfg, w, opts.jobs); break;
    case Command::neardegen_check: out = cmd_neardegen(cfg, w, opts.jobs); break;
  }
  out.summary["meta"] = {{"tool", kTool},
                         {"version", COHERENCE_ENGINE_VERSION},
                         {"command", std::string(command_name(cfg.command))},
                         {"config_hash", hash_hex(cfg.hash)}};
  out.files = w.files();
  out.summary["files"] = out.files;
  return out;
}

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Coherence-powered work extraction from a V-type three-level atom", kTool};
  app.set_version_flag("--version", std::string(kTool) + " " + COHERENCE_ENGINE_VERSION);
  app.require_subcommand(1);

  struct Flags {
    std::string config;
    Overrides overrides;
    unsigned jobs = 1;
  } flags;

  const std::pair<Command, const char*> commands[] = {
      {Command::evolve, "Integrate the master equation and write a trajectory"},
      {Command::steady, "Long-time state for a given start"},
      {Command::protocol1, "Repeated coherence-to-work protocol"},
      {Command::protocol2, "Single-shot protocol saturating the free-energy difference"},
      {Command::figure_wfed, "Repeated-protocol work and free-energy difference over a beta grid"},
      {Command::neardegen_check, "Perturbative near-degenerate solution against full integration"},
  };
  for (const auto& [cmd, help] : commands) {
    CLI::App* sub = app.add_subcommand(std::string(command_name(cmd)), help);
    sub->add_option("-c,--config", flags.config, "JSON experiment config")->check(CLI::ExistingFile);
    sub->add_option("--beta", flags.overrides.beta, "Override bath.beta");
    sub->add_option("--omega", flags.overrides.omega, "Override system.omega");
    sub->add_option("--alignment", flags.overrides.alignment, "Override bath.alignment");
    sub->add_option("--out", flags.overrides.out, "Override output.dir");
    sub->add_option("-j,--jobs", flags.jobs, "Grid points run concurrently (0 = all cores)");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return ExitCode::ok;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return ExitCode::ok;
  } catch (const CLI::CallForVersion&) {
    out << kTool << ' ' << COHERENCE_ENGINE_VERSION << '\n';
    return ExitCode::ok;
  } catch (const CLI::ParseError& e) {
    diagnostic(err, "usage", e.what());
    return ExitCode::config_failure;
  }

  const Command cmd = *parse_command(app.get_subcommands().front()->get_name());
  ExperimentConfig cfg;
  try {
    json doc = flags.config.empty() ? json::object() : load_config_file(flags.config);
    cfg = parse_config(cmd, apply_overrides(std::move(doc), flags.overrides));
  } catch (const ConfigError& e) {
    diagnostic(err, "config", e.what(), {{"path", e.path()}});
    return ExitCode::config_failure;
  }

  diagnostics::ScopedSink sink([&err](const diagnostics::Record& r) {
    if (r.severity > diagnostics::threshold()) return;
    json line = {{"level", diagnostics::to_string(r.severity)}, {"event", r.event}};
    if (!r.fields.empty()) line["fields"] = r.fields;
    err << line.dump() << '\n';
  });
  try {
    const RunOutcome res = run_experiment(cfg, RunOptions{flags.jobs});
    out << res.summary.dump(2) << '\n';
    return ExitCode::ok;
  } catch (const ConfigError& e) {
    diagnostic(err, "config", e.what(), {{"path", e.path()}});
    return ExitCode::config_failure;
  } catch (const InvalidArgument& e) {
    diagnostic(err, "config", e.what());
    return ExitCode::config_failure;
  } catch (const NumericalError& e) {
    diagnostic(err, "numerical", e.what(), {{"reached_time", num(e.reached_time())}});
    return ExitCode::numerical_failure;
  } catch (const std::exception& e) {
    diagnostic(err, "io", e.what());
    return ExitCode::io_failure;
  }
}

}  // namespace coherence::cli
