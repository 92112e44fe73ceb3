#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>

#include "heligate/config.hpp"
#include "heligate/error.hpp"
#include "heligate/io.hpp"
#include "heligate/search.hpp"

#ifndef HELIGATE_VERSION
#define HELIGATE_VERSION "0.0.0"
#endif

namespace fs = std::filesystem;
using namespace heligate;

namespace {

struct Globals {
  std::string config;
  std::string out;
  int workers = 0;
  std::optional<double> dt;
  std::optional<std::uint64_t> seed;
  std::string command_line;
};

// Collects outputs and writes the manifest last.
class Run {
 public:
  Run(std::string command, const Globals& g, const RunConfig& cfg)
      : t0_(std::chrono::steady_clock::now()) {
    m_.version = HELIGATE_VERSION;
    m_.command = std::move(command);
    m_.config_hash = cfg.hash();
    m_.config = cfg.to_json();
    for (const auto& in : cfg.inputs) {
      std::error_code ec;
      m_.inputs.push_back({in.path, in.sha256, fs::file_size(in.path, ec)});
    }
    if (!g.out.empty()) {
      dir_ = g.out;
    } else if (const char* env = std::getenv("HELIGATE_OUT"); env && *env) {
      dir_ = env;
    } else {
      dir_ = "heligate-out";
    }
  }

  const fs::path& dir() const { return dir_; }
  void add_input(const std::string& path) {
    std::error_code ec;
    m_.inputs.push_back({path, sha256_file(path), fs::file_size(path, ec)});
  }
  void write(const std::string& name, const std::string& content) {
    write_file_atomic(dir_ / name, content);
    for (auto& o : m_.outputs) {
      if (o.path == name) {
        o = {name, sha256_hex(content), content.size()};
        return;
      }
    }
    m_.outputs.push_back({name, sha256_hex(content), content.size()});
  }
  void write_json(const std::string& name, const json& j) { write(name, j.dump(2) + "\n"); }
  void warn(const std::string& w) {
    std::cerr << "warning: " << w << "\n";
    m_.warnings.push_back(w);
  }
  json& solver() { return m_.solver; }
  void finish() {
    m_.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0_).count();
    write_file_atomic(dir_ / "manifest.json", m_.to_json().dump(2) + "\n");
  }

 private:
  std::chrono::steady_clock::time_point t0_;
  RunManifest m_;
  fs::path dir_;
};

RunConfig load_config(const Globals& g, const std::function<void(json&)>& overrides) {
  json j = {{"schema_version", kSchemaVersion}};
  fs::path base;
  if (!g.config.empty()) {
    const std::string text = read_file(g.config);
    try {
      j = json::parse(text);
    } catch (const json::parse_error& e) {
      throw ConfigError(g.config + ": " + e.what());
    }
    if (!j.is_object()) throw ConfigError(g.config + ": expected a JSON object");
    base = fs::path(g.config).parent_path();
  }
  if (g.dt) j["numerics"]["dt_ns"] = *g.dt;
  if (g.seed) j["volt_opt"]["seed"] = *g.seed;
  overrides(j);
  RunConfig cfg = RunConfig::from_json(j, base);
  if (!g.config.empty()) cfg.inputs.insert(cfg.inputs.begin(), {"config", g.config, sha256_file(g.config)});
  return cfg;
}

int worker_count(const Globals& g) {
  if (g.workers > 0) return g.workers;
  return std::max(1u, std::thread::hardware_concurrency());
}

std::string fixed(double x, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, x);
  return buf;
}

// Shortest of %.{1..3}g-ish formatting for echoed times.
std::string short_num(double x) {
  for (int p = 1; p <= 12; ++p) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*g", p, x);
    if (std::abs(std::strtod(buf, nullptr) - x) <= 1e-9 * std::max(1.0, std::abs(x))) return buf;
  }
  return std::to_string(x);
}

BasisPtr path_basis(const RunConfig& cfg, const DeviceModel& dev, const VoltageVector& idle) {
  const VoltageVector ends[2] = {idle, cfg.voltage(cfg.voltage_function.end)};
  return auto_basis(dev, std::span<const VoltageVector>(ends), cfg.grid_options());
}

GateSystem build_system(const RunConfig& cfg, const VoltageVector& idle) {
  const DeviceModel dev = cfg.device_model();
  BasisPtr basis = path_basis(cfg, dev, idle);
  return GateSystem::build(dev, basis, idle, cfg.numerics.spectrum, cfg.numerics.cn);
}

json system_json(const GateSystem& sys) {
  json e = json::array();
  for (double x : sys.idle.energies) e.push_back(sys.device.units.to_ghz(x));
  return {{"grid_left", sys.basis->left.count},
          {"grid_right", sys.basis->right.count},
          {"idle_energies_ghz", e},
          {"idle_zeta_ghz", sys.device.units.to_ghz(zz_coupling(sys.idle.energies))},
          {"eigen_iterations", sys.idle.iterations}};
}

json sweep_stats(const SweepResult& r) {
  long fwd = 0, br = 0, adj = 0;
  for (const auto& c : r.row_costs) {
    fwd += c.forward_steps;
    br += c.branch_steps;
    adj += c.adjoint_steps;
  }
  std::size_t failed = 0;
  for (const auto& c : r.cells) failed += !c.ok;
  return {{"cells", r.cells.size()},     {"failed_cells", failed},   {"forward_steps", fwd},
          {"branch_steps", br},          {"adjoint_steps", adj},     {"sweep_wall_seconds", r.wall_seconds},
          {"dt_ns", r.dt_ns}};
}

std::string echo_optimum(const CellResult& c) {
  return "F=" + fixed(c.report.fidelity, 3) + ", t_ramp=" + fixed(c.t_ramp_ns, 2) + " ns, t_hold=" +
         short_num(c.t_hold_ns) + " ns";
}

json cell_json(const CellResult& c) {
  json j = {{"t_ramp_ns", c.t_ramp_ns}, {"t_hold_ns", c.t_hold_ns}, {"ok", c.ok}};
  if (c.ok) {
    j["u"] = gate_to_json(c.u);
    j["report"] = report_to_json(c.report);
  } else {
    j["error"] = c.error;
  }
  return j;
}

void persist_sweep(Run& run, const SweepResult& r, const std::string& prefix) {
  run.write(prefix + ".csv", sweep_csv(r.cells));
  std::size_t failed = 0;
  for (const auto& c : r.cells) failed += !c.ok;
  if (failed) {
    run.write(prefix + "_errors.csv", sweep_errors_csv(r.cells));
    run.warn(std::to_string(failed) + " of " + std::to_string(r.cells.size()) + " cells failed; see " + prefix +
             "_errors.csv");
  }
}

// ---- subcommands ----

int cmd_spectrum(const Globals& g, bool kappa_zero, const std::vector<double>& lambdas) {
  RunConfig cfg = load_config(g, [&](json& j) {
    if (kappa_zero) j["spectrum"]["kappa_zero"] = true;
    if (!lambdas.empty()) j["spectrum"]["lambdas"] = lambdas;
  });
  Run run("spectrum", g, cfg);
  DeviceModel dev = cfg.device_model();
  if (cfg.spectrum.kappa_zero) dev.kappa = 0.0;
  const VoltageVector& idle = cfg.voltage(cfg.spectrum.idle.value_or(cfg.voltage_function.start));
  const BasisPtr basis = path_basis(cfg, dev, idle);
  const auto rows = spectrum_sweep(dev, basis, cfg.voltage_function_value(), cfg.spectrum.lambdas, cfg.numerics.spectrum);
  run.write("spectrum.csv", spectrum_csv(rows));
  run.solver() = {{"rows", rows.size()}, {"grid_left", basis->left.count}, {"grid_right", basis->right.count}};
  run.finish();
  std::cout << "spectrum: " << rows.size() << " rows -> " << (run.dir() / "spectrum.csv").string() << "\n";
  return 0;
}

int cmd_propagate(const Globals& g) {
  RunConfig cfg = load_config(g, [](json&) {});
  Run run("propagate", g, cfg);
  const GateSystem sys = build_system(cfg, cfg.voltage(cfg.voltage_function.start));
  const auto& pc = cfg.propagate;
  PropagationPlan plan;
  plan.schedule = RampSchedule(pc.t_ramp_ns, pc.t_hold_ns);
  plan.voltage_fn = cfg.voltage_function_value();
  plan.dt_ns = cfg.numerics.dt_ns;
  plan.snapshot_times_ns = pc.snapshots_ns;
  plan.validate();

  PropagateOptions po;
  po.cn = cfg.numerics.cn;
  const int nover = std::min<int>(pc.overlap_states, static_cast<int>(sys.idle.states.size()));
  po.overlap_basis = std::span<const TwoBodyState>(sys.idle.states.data(), nover);
  po.overlap_every = pc.overlap_every;

  static const char* labels[4] = {"00", "01", "10", "11"};
  const auto qs = sys.qubit_states();
  std::vector<TwoBodyState> finals;
  json traj = {{"dt_ns", plan.dt_ns}, {"t_ramp_ns", pc.t_ramp_ns}, {"t_hold_ns", pc.t_hold_ns}, {"states", json::array()}};
  long steps = 0, iters = 0;
  double drift = 0.0, resid = 0.0;
  for (int q = 0; q < 4; ++q) {
    Trajectory t = propagate(sys.device, sys.basis, plan, qs[q], po);
    finals.push_back(t.final_state);
    steps += t.steps;
    iters += t.solver_iterations;
    drift = std::max(drift, t.norm_drift);
    resid = std::max(resid, t.max_residual);
    if (t.overlaps) {
      run.write(std::string("overlaps_") + labels[q] + ".csv", overlap_csv(*t.overlaps, kQubitIndices[q]));
      traj["states"].push_back({{"label", labels[q]},
                                {"eigen_index", kQubitIndices[q]},
                                {"times_ns", t.overlaps->times_ns},
                                {"rows", t.overlaps->rows}});
    }
  }
  const GateMatrix u = overlap_gate_matrix(sys.idle.states, finals);
  const FidelityReport rep = optimize_rotations(u, target_gate(pc.target));
  run.write_json("gate.json", {{"target", to_string(pc.target)},
                               {"t_ramp_ns", pc.t_ramp_ns},
                               {"t_hold_ns", pc.t_hold_ns},
                               {"u", gate_to_json(u)},
                               {"report", report_to_json(rep)}});
  run.write_json("trajectory.json", traj);
  run.solver() = system_json(sys);
  run.solver().update({{"steps", steps}, {"gmres_iterations", iters}, {"norm_drift", drift}, {"max_residual", resid}});
  if (rep.flat_landscape) run.warn("fidelity landscape is flat in the rotation angles");
  run.finish();
  std::cout << "F=" << fixed(rep.fidelity, 6) << ", swap_error=" << fixed(rep.swap_error, 6)
            << ", leak_error=" << fixed(rep.leakage_error, 6) << "\n";
  return 0;
}

int cmd_gate_search(const Globals& g, const std::string& target) {
  RunConfig cfg = load_config(g, [&](json& j) {
    if (!target.empty()) j["search"]["target"] = target;
  });
  if (cfg.search.holds_ns.empty()) throw ConfigError("search.holds_ns: empty hold list");
  if (cfg.search.ramps_ns.empty()) throw ConfigError("search.ramps_ns: empty ramp list");
  Run run("gate-search", g, cfg);
  const GateSystem sys = build_system(cfg, cfg.voltage(cfg.voltage_function.start));
  SweepSpec spec;
  spec.ramp_values = cfg.search.ramps_ns;
  spec.hold_values = cfg.search.holds_ns;
  spec.voltage_fn = cfg.voltage_function_value();
  spec.target = cfg.search.target;
  spec.dt_ns = cfg.numerics.dt_ns;
  spec.validate();

  SearchOptions so;
  so.workers = worker_count(g);
  so.shared_ramp_down = cfg.search.shared_ramp_down;
  std::vector<bool> done(spec.ramp_values.size(), false);
  so.on_row = [&](std::size_t r, const SweepResult& res) {
    done[r] = true;
    std::vector<CellResult> finished;
    for (std::size_t i = 0; i < done.size(); ++i) {
      if (!done[i]) continue;
      for (std::size_t h = 0; h < res.hold_values.size(); ++h) finished.push_back(res.cell(i, h));
    }
    write_file_atomic(run.dir() / "sweep.partial.csv", sweep_csv(finished));
  };
  const SweepResult res = grid_search(sys, spec, so);
  persist_sweep(run, res, "sweep");
  std::error_code ec;
  fs::remove(run.dir() / "sweep.partial.csv", ec);
  run.solver() = system_json(sys);
  run.solver().update(sweep_stats(res));
  if (!res.optimum) {
    run.finish();
    std::cerr << "error: every cell of the sweep failed\n";
    return 2;
  }
  const CellResult& best = res.cells[*res.optimum];
  run.write_json("optimum.json", cell_json(best));
  run.finish();
  std::cout << echo_optimum(best) << "\n";
  return 0;
}

int cmd_sensitivity(const Globals& g, std::optional<double> cr, std::optional<double> ch, const std::string& target) {
  RunConfig cfg = load_config(g, [&](json& j) {
    if (cr) j["sensitivity"]["center_ramp_ns"] = *cr;
    if (ch) j["sensitivity"]["center_hold_ns"] = *ch;
    if (!target.empty()) j["sensitivity"]["target"] = target;
  });
  const auto& sc = cfg.sensitivity;
  if (!sc.center_ramp_ns || !sc.center_hold_ns) {
    throw ConfigError("sensitivity: center_ramp_ns and center_hold_ns are required");
  }
  Run run("sensitivity", g, cfg);
  const GateSystem sys = build_system(cfg, cfg.voltage(cfg.voltage_function.start));
  SweepSpec base;
  base.voltage_fn = cfg.voltage_function_value();
  base.target = sc.target;
  base.dt_ns = cfg.numerics.dt_ns;
  SearchOptions so;
  so.workers = worker_count(g);
  const SensitivityResult r =
      sensitivity_sweep(sys, *sc.center_ramp_ns, *sc.center_hold_ns, sc.window_ns, sc.resolution_ns, base, so);
  persist_sweep(run, r.map, "sensitivity_map");
  run.write("ramp_section.csv", sweep_csv(r.ramp_section));
  run.write("hold_section.csv", sweep_csv(r.hold_section));
  run.solver() = system_json(sys);
  run.solver().update(sweep_stats(r.map));
  run.finish();
  if (r.map.optimum) std::cout << echo_optimum(r.map.cells[*r.map.optimum]) << "\n";
  return r.map.optimum ? 0 : 2;
}

int cmd_volt_opt(const Globals& g, const std::string& kind, std::optional<int> budget) {
  RunConfig cfg = load_config(g, [&](json& j) {
    if (!kind.empty()) j["volt_opt"]["config"] = kind;
    if (budget) j["volt_opt"]["budget"] = *budget;
  });
  Run run("volt-opt", g, cfg);
  const LossSpec spec = cfg.loss_spec();
  SpectrumEvaluator eval = device_evaluator(cfg.device_model(), cfg.grid_options(), cfg.numerics.spectrum);
  if (cfg.volt_opt.max_well_shift_um) {
    eval = pinned_wells(std::move(eval), cfg.device_model(), cfg.voltage(cfg.volt_opt.initial), *cfg.volt_opt.max_well_shift_um);
  }
  const OptimizationTrace t =
      optimize_voltages(cfg.voltage(cfg.volt_opt.initial), spec, cfg.volt_opt.budget, eval, cfg.optimizer_options());
  const std::string name = "voltages_" + to_string(spec.config);
  run.write(name + ".csv", voltage_csv(t.best));
  run.write_json("trace.json", trace_to_json(t));
  run.solver() = {{"evaluations", t.evaluations},
                  {"failed_evaluations", t.failed_evaluations},
                  {"budget_exhausted", t.budget_exhausted},
                  {"initial_loss", t.iterates.front().loss},
                  {"best_loss", t.best_breakdown.total}};
  if (t.budget_exhausted) run.warn("evaluation budget exhausted before convergence");
  if (t.failed_evaluations) run.warn(std::to_string(t.failed_evaluations) + " loss evaluations failed");
  run.finish();
  std::cout << "loss " << t.iterates.front().loss << " -> " << t.best_breakdown.total << " (zeta "
            << t.best_breakdown.zeta_ghz << " GHz), " << t.evaluations << " evaluations\n";
  return 0;
}

int cmd_analyze(const Globals& g, const std::string& gate, const std::string& traj, const std::string& target) {
  RunConfig cfg = load_config(g, [&](json& j) {
    if (!gate.empty()) j["analyze"]["gate"] = fs::absolute(gate).string();
    if (!traj.empty()) j["analyze"]["trajectory"] = fs::absolute(traj).string();
    if (!target.empty()) j["analyze"]["target"] = target;
  });
  const auto& ac = cfg.analyze;
  if (ac.gate.empty() && ac.trajectory.empty()) throw ConfigError("analyze: give a gate JSON and/or a trajectory");
  Run run("analyze", g, cfg);
  if (!ac.gate.empty()) {
    run.add_input(ac.gate);
    json j;
    try {
      j = json::parse(read_file(ac.gate));
    } catch (const json::parse_error& e) {
      throw ConfigError(ac.gate + ": " + e.what());
    }
    GateMatrix u;
    try {
      u = gate_from_json(j);
    } catch (const ConfigError& e) {
      throw ConfigError(ac.gate + ": " + e.what());
    }
    const ElementReport rep = elementwise_report(u, ac.target);
    run.write("elementwise.csv", elementwise_csv(rep));
    const FidelityReport fr = optimize_rotations(u, target_gate(ac.target));
    run.write_json("fidelity.json", report_to_json(fr));
    std::cout << "F=" << fixed(fr.fidelity, 6) << " against " << to_string(ac.target) << "\n";
  }
  if (!ac.trajectory.empty()) {
    run.add_input(ac.trajectory);
    json j;
    try {
      j = json::parse(read_file(ac.trajectory));
      for (const auto& s : j.at("states")) {
        OverlapSeries series;
        series.times_ns = s.at("times_ns").get<std::vector<double>>();
        series.rows = s.at("rows").get<std::vector<std::vector<double>>>();
        if (series.rows.size() != series.times_ns.size()) throw ConfigError("row count differs from time count");
        run.write("overlaps_" + s.at("label").get<std::string>() + ".csv",
                  overlap_csv(series, s.at("eigen_index").get<int>()));
      }
    } catch (const json::exception& e) {
      throw ConfigError(ac.trajectory + ": " + e.what());
    }
  }
  run.finish();
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Two-electron gate simulator for electrons on helium"};
  app.require_subcommand(1);
  app.set_version_flag("--version", HELIGATE_VERSION);
  Globals g;
  for (int i = 0; i < argc; ++i) g.command_line += (i ? " " : "") + std::string(argv[i]);

  auto add_globals = [&](CLI::App* sub) {
    sub->add_option("--config", g.config, "JSON run configuration")->check(CLI::ExistingFile);
    sub->add_option("--out", g.out, "output directory (default: $HELIGATE_OUT or ./heligate-out)");
    sub->add_option("--workers", g.workers, "worker threads for sweeps (default: all cores)")->check(CLI::PositiveNumber);
    sub->add_option("--dt", g.dt, "time step in ns")->check(CLI::PositiveNumber);
    sub->add_option("--seed", g.seed, "optimizer seed");
  };

  auto* spectrum = app.add_subcommand("spectrum", "six lowest energies and zeta along V(lambda)");
  add_globals(spectrum);
  bool kappa_zero = false;
  std::vector<double> lambdas;
  spectrum->add_flag("--kappa-zero", kappa_zero, "switch off the Coulomb interaction");
  spectrum->add_option("--lambda", lambdas, "lambda values (overrides the config)");

  auto* propagate = app.add_subcommand("propagate", "propagate the qubit states through one gate");
  add_globals(propagate);

  auto* search = app.add_subcommand("gate-search", "grid search over ramp and hold times");
  add_globals(search);
  std::string target;
  search->add_option("--target", target, "sqrt_iswap or cz");

  auto* sens = app.add_subcommand("sensitivity", "fidelity map around an operating point");
  add_globals(sens);
  std::optional<double> cr, ch;
  sens->add_option("--center-ramp", cr, "ramp time at the center (ns)");
  sens->add_option("--center-hold", ch, "hold time at the center (ns)");
  sens->add_option("--target", target, "sqrt_iswap or cz");

  auto* vopt = app.add_subcommand("volt-opt", "optimize electrode voltages for a loss configuration");
  add_globals(vopt);
  std::string kind;
  std::optional<int> budget;
  vopt->add_option("--kind", kind, "I, II, III or zeta");
  vopt->add_option("--budget", budget, "maximum loss evaluations")->check(CLI::NonNegativeNumber);

  auto* analyze = app.add_subcommand("analyze", "element-wise gate report and overlap series");
  add_globals(analyze);
  std::string gate, traj;
  analyze->add_option("--gate", gate, "gate JSON")->check(CLI::ExistingFile);
  analyze->add_option("--trajectory", traj, "trajectory JSON written by propagate")->check(CLI::ExistingFile);
  analyze->add_option("--target", target, "sqrt_iswap, cz or identity");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 1;
  }

  try {
    if (*spectrum) return cmd_spectrum(g, kappa_zero, lambdas);
    if (*propagate) return cmd_propagate(g);
    if (*search) return cmd_gate_search(g, target);
    if (*sens) return cmd_sensitivity(g, cr, ch, target);
    if (*vopt) return cmd_volt_opt(g, kind, budget);
    if (*analyze) return cmd_analyze(g, gate, traj, target);
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const DomainError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const ConvergenceError& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return 2;
  }
  return 1;
}
