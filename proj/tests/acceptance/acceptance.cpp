// Acceptance checks: one PASS/FAIL line per criterion.
//
//   heligate_acceptance              criteria 1-7 and 9
//   heligate_acceptance --only 3,5   a subset
//   heligate_acceptance --demo       desk-scale gate search (criterion 8, up to two hours)

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iostream>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>

#include "heligate/config.hpp"
#include "heligate/io.hpp"
#include "heligate/search.hpp"
#include "heligate/voltage_opt.hpp"

using namespace heligate;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, x);
  return buf;
}

std::string source_path(const std::string& rel) { return std::string(HELIGATE_SOURCE_DIR) + "/" + rel; }

VoltageVector desk(const char* name) { return load_voltage_csv(source_path(std::string("configs/desk_") + name + ".csv")); }

BasisPtr basis_for(const DeviceModel& dev, std::initializer_list<VoltageVector> vs, int points) {
  GridOptions g;
  g.points_per_well = points;
  std::vector<VoltageVector> v(vs);
  return auto_basis(dev, std::span<const VoltageVector>(v), g);
}

GateMatrix random_unitary(std::mt19937_64& rng) {
  std::normal_distribution<double> n;
  GateMatrix m;
  for (int i = 0; i < 16; ++i) m.data()[i] = {n(rng), n(rng)};
  return Eigen::HouseholderQR<GateMatrix>(m).householderQ();
}

Outcome fidelity_identities() {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> phi(-M_PI, M_PI);
  const GateMatrix u0 = random_unitary(rng);
  const double f_same = average_fidelity(u0, u0);
  double worst = 0.0;
  for (int i = 0; i < 100; ++i) worst = std::max(worst, std::abs(average_fidelity(std::polar(1.0, phi(rng)) * u0, u0) - 1.0));
  const double f_cz = average_fidelity(GateMatrix::Identity(), target_gate(GateKind::cz));
  // F(U0,U0) is (4 + 16)/20 up to rounding in Tr(U U^dag).
  const bool ok = std::abs(f_same - 1.0) <= 4 * std::numeric_limits<double>::epsilon() && worst < 1e-12 &&
                  std::abs(f_cz - 0.4) < 1e-12;
  return {ok, "F(U,U)-1=" + fmt("%.1e", f_same - 1.0) + " max|F(e^iphi U,U)-1|=" + fmt("%.1e", worst) +
                  " F(I,CZ)=" + fmt("%.15f", f_cz)};
}

Outcome eigensolver_oracle() {
  const DeviceModel dev;
  double de = 0.0, deficit = 0.0;
  for (const auto& v : {builtin_voltages().at("I"), desk("I"), desk("II")}) {
    for (int n : {8, 12, 16}) {
      const auto basis = basis_for(dev, {v}, n);
      OperatorCache c(basis, dev.kappa, dev.epsilon);
      auto [l, r] = potential_diagonals(*basis, dev.profile, v, dev.units);
      c.set_potentials(l, r);
      const auto it = solve_spectrum(c);
      const auto ref = dense_spectrum(c, 6);
      for (int i = 0; i < 6; ++i) {
        de = std::max(de, std::abs(it.energies[i] - ref.energies[i]));
        deficit = std::max(deficit, 1.0 - std::norm(inner(it.states[i], ref.states[i])));
      }
    }
  }
  return {de < 1e-8 && deficit < 1e-6,
          "grids 8..16 per well, max |dE|=" + fmt("%.1e", de) + " max overlap deficit=" + fmt("%.1e", deficit)};
}

Outcome propagator_order() {
  const DeviceModel dev;
  const auto vi = desk("I"), vii = desk("II");
  const auto basis = basis_for(dev, {vi, vii}, 16);
  const auto sys = GateSystem::build(dev, basis, vi);
  const auto f = VoltageFunction::make(vi, vii, VoltageFamily::zeta, TargetConfig::II);
  const auto psi = sys.qubit_states();
  auto finals = [&](double dt) {
    std::vector<TwoBodyState> out;
    PropagationPlan plan{RampSchedule(0.2, 0.2), f, dt, {}};
    for (const auto& s : psi) out.push_back(propagate(dev, basis, plan, s).final_state);
    return out;
  };
  const std::vector<double> dts = {4e-3, 2e-3, 1e-3};
  const auto ref = finals(dts.back() / 8);
  std::vector<double> err;
  for (double dt : dts) {
    const auto fin = finals(dt);
    double e = 0.0;
    for (std::size_t i = 0; i < fin.size(); ++i) e = std::max(e, (fin[i].coeffs() - ref[i].coeffs()).norm());
    err.push_back(e);
  }
  // least-squares slope of log(err) against log(dt)
  double mx = 0, my = 0;
  for (int i = 0; i < 3; ++i) mx += std::log(dts[i]) / 3, my += std::log(err[i]) / 3;
  double sxy = 0, sxx = 0;
  for (int i = 0; i < 3; ++i) {
    sxy += (std::log(dts[i]) - mx) * (std::log(err[i]) - my);
    sxx += (std::log(dts[i]) - mx) * (std::log(dts[i]) - mx);
  }
  const double p = sxy / sxx;

  PropagationPlan gate{RampSchedule(0.5, 9.0), f, 0.002, {}};
  double drift = 0.0;
  for (const auto& s : psi) drift = std::max(drift, propagate(dev, basis, gate, s).norm_drift);
  return {std::abs(p - 2.0) <= 0.1 && drift < 1e-8,
          "errors " + fmt("%.3e", err[0]) + "/" + fmt("%.3e", err[1]) + "/" + fmt("%.3e", err[2]) +
              " exponent=" + fmt("%.3f", p) + " norm drift over 10 ns=" + fmt("%.1e", drift)};
}

Outcome zz_phase() {
  // Held at the swap-point vector, where zeta is sizable; start == end gives a static Hamiltonian.
  const DeviceModel dev;
  const auto v = desk("II");
  const auto sys = GateSystem::build(dev, basis_for(dev, {v}, 16), v);
  const auto f = VoltageFunction::make(v, v, VoltageFamily::zeta, TargetConfig::II);
  const double t_ramp = 0.05, t_hold = 0.1, dt = 5e-6;
  const GateMatrix u = gate_matrix_cold(sys, f, t_ramp, t_hold, dt);
  const double zeta = zz_coupling(sys.idle.energies);
  const double t = dev.units.from_ns(t_hold + 2 * t_ramp);
  const GateMatrix g = canonical_gate(u);
  const double err = std::abs(wrap_angle(std::arg(g(3, 3)) + zeta * t));
  return {err < 1e-6, "zeta=" + fmt("%.6f", dev.units.to_ghz(zeta)) + " GHz, zeta*T=" + fmt("%.6f", zeta * t) +
                          " rad, |arg G33 + zeta T|=" + fmt("%.1e", err)};
}

Outcome warm_start(int workers) {
  const DeviceModel dev;
  const auto vi = desk("I"), vii = desk("II");
  const auto sys = GateSystem::build(dev, basis_for(dev, {vi, vii}, 24), vi);
  SweepSpec spec;
  spec.voltage_fn = VoltageFunction::make(vi, vii, VoltageFamily::zeta, TargetConfig::II);
  spec.ramp_values = {0.25 * 4 * std::sqrt(2.0)};
  spec.hold_values = uniform_values(0.0, 5.0, 0.1);
  spec.dt_ns = 0.002;
  const auto warm = grid_search(sys, spec);

  std::vector<CellResult> cold(spec.hold_values.size());
  std::vector<std::thread> pool;
  const std::size_t nthreads = std::max(1, workers);
  for (std::size_t w = 0; w < nthreads; ++w) {
    pool.emplace_back([&, w] {
      for (std::size_t h = w; h < cold.size(); h += nthreads)
        cold[h] = evaluate_cell(sys, spec, spec.ramp_values[0], spec.hold_values[h]);
    });
  }
  for (auto& t : pool) t.join();

  double worst = 0.0;
  bool all_ok = true;
  for (std::size_t h = 0; h < cold.size(); ++h) {
    all_ok = all_ok && warm.cells[h].ok && cold[h].ok;
    worst = std::max(worst, std::abs(warm.cells[h].report.fidelity - cold[h].report.fidelity));
  }
  long cold_steps = cold_step_count(spec);
  return {all_ok && worst < 1e-8, "51 holds at t_ramp=1.41 ns, 24x24: max |F_warm-F_cold|=" + fmt("%.1e", worst) +
                                      ", steps warm/cold=" + std::to_string(warm.total_steps()) + "/" +
                                      std::to_string(cold_steps)};
}

Outcome ramp_values() {
  double e0 = 0.0, esym = 0.0;
  for (double tr : {0.2, 1.0, 2.5})
    for (double th : {0.0, 0.7, 5.0})
      for (double lm : {0.46, 1.0}) {
        const RampSchedule s(tr, th);
        e0 = std::max(e0, std::abs(lambda_at(s, lm, 0.0) - lm * (1 - std::erf(2.0)) / 2));
        for (int k = 0; k <= 100; ++k) {
          const double t = s.t_gate_ns() * k / 100.0;
          esym = std::max(esym, std::abs(lambda_at(s, lm, t) - lambda_at(s, lm, s.t_gate_ns() - t)));
        }
      }
  return {e0 < 1e-12 && esym < 1e-12, "max |lambda(0)-ref|=" + fmt("%.1e", e0) + " max asymmetry=" + fmt("%.1e", esym)};
}

Outcome loss_structure() {
  const std::vector<double> wide = {0.0, 8.0, 12.0, 16.0, 20.0, 24.0};
  const std::vector<double> deg = {0.0, 9.0, 11.0, 21.0, 21.0, 21.0};
  const auto i = loss_from_energies(LossSpec::defaults(LossConfig::I), wide);
  const auto ii = loss_from_energies(LossSpec::defaults(LossConfig::II), wide);
  const auto iii = loss_from_energies(LossSpec::defaults(LossConfig::III), deg);
  const bool counts = i.terms.size() == 3 && ii.terms.size() == 4 && iii.terms.size() == 5;
  const std::vector<double> printed = {i.terms[1].weight, ii.terms[1].weight, ii.terms[2].weight, iii.terms[1].weight,
                                       iii.terms[4].weight};
  const bool weights = printed == std::vector<double>{1e-2, 1e-4, 1e-2, 1.0, 1e4} && i.terms[2].weight == 1e-2 &&
                       ii.terms[3].weight == 1e-2 && iii.terms[2].weight == 1.0 && iii.terms[3].weight == 1.0;
  const bool hinges = i.terms[1].value == 0.0 && i.terms[2].value == 0.0 && ii.terms[2].value == 0.0 &&
                      ii.terms[3].value == 0.0 && iii.terms[4].value == 0.0;
  std::ostringstream d;
  d << "terms " << i.terms.size() << "/" << ii.terms.size() << "/" << iii.terms.size() << ", weights "
    << (weights ? "as printed" : "MISMATCH") << ", hinges " << (hinges ? "vanish" : "ACTIVE");
  return {counts && weights && hinges, d.str()};
}

Outcome table_round_trip() {
  // The three columns as printed, one file per vector.
  const char* columns[3][7] = {
      {"389.50", "200.70", "400.36", "-290.61", "398.59", "200.15", "381.40"},
      {"388.68", "206.69", "404.88", "-288.37", "401.04", "192.98", "382.57"},
      {"388.17", "194.01", "401.87", "-289.10", "398.95", "198.82", "382.44"},
  };
  const char* names[3] = {"I", "II", "III"};
  bool ok = true;
  for (int c = 0; c < 3; ++c) {
    std::string text = "electrode,mV\n";
    for (int k = 0; k < 7; ++k) text += std::to_string(k + 1) + "," + columns[c][k] + "\n";
    const auto v = parse_voltage_csv(text);
    ok = ok && voltage_csv(v) == text && v == builtin_voltages().at(names[c]);
  }
  const auto f = VoltageFunction::make(builtin_voltages().at("I"), builtin_voltages().at("III"), VoltageFamily::zeta,
                                       TargetConfig::III);
  const double mid = voltage_at(f, 0.5).mv[1];
  return {ok && mid == 197.355, std::string("csv ") + (ok ? "bit-identical" : "DIFFERS") + ", V2(0.5)=" + format_number(mid)};
}

// Desk-scale search along one voltage function; writes the full surface.
struct DemoResult {
  bool pass = false;
  std::string detail;
};

DemoResult demo_search(const std::string& config_path, const fs::path& out, int workers) {
  const auto cfg = RunConfig::load(config_path);
  const DeviceModel dev = cfg.device_model();
  const auto f = cfg.voltage_function_value();
  const VoltageVector ends[2] = {f.start, f.end};
  const auto basis = auto_basis(dev, std::span<const VoltageVector>(ends, 2), cfg.grid_options());
  const auto sys = GateSystem::build(dev, basis, f.start, cfg.numerics.spectrum, cfg.numerics.cn);
  SweepSpec spec;
  spec.voltage_fn = f;
  spec.ramp_values = cfg.search.ramps_ns;
  spec.hold_values = cfg.search.holds_ns;
  spec.target = cfg.search.target;
  spec.dt_ns = cfg.numerics.dt_ns;
  SearchOptions o;
  o.workers = workers;
  const auto res = grid_search(sys, spec, o);
  fs::create_directories(out);
  write_file_atomic(out / "sweep.csv", sweep_csv(res.cells));

  const bool swap = spec.target == GateKind::sqrt_iswap;
  const double f_min = swap ? 0.99 : 0.98;
  auto err_of = [&](const CellResult& c) { return swap ? c.report.swap_error : c.report.leakage_error; };
  const CellResult* best = nullptr;     // highest F overall
  const CellResult* qualify = nullptr;  // highest F among cells meeting the error bound
  for (const auto& c : res.cells) {
    if (!c.ok) continue;
    if (!best || c.report.fidelity > best->report.fidelity) best = &c;
    if (err_of(c) <= 0.05 && (!qualify || c.report.fidelity > qualify->report.fidelity)) qualify = &c;
  }
  json summary = {{"config", config_path},
                  {"target", to_string(spec.target)},
                  {"cells", res.cells.size()},
                  {"wall_seconds", res.wall_seconds}};
  std::ostringstream d;
  d << to_string(spec.target) << " " << res.cells.size() << " cells in " << fmt("%.0f", res.wall_seconds) << " s";
  if (best) {
    summary["best"] = {{"t_ramp_ns", best->t_ramp_ns}, {"t_hold_ns", best->t_hold_ns}, {"fidelity", best->report.fidelity},
                       {"error", err_of(*best)}};
    d << "; best F=" << fmt("%.4f", best->report.fidelity) << " at t_ramp=" << fmt("%.3f", best->t_ramp_ns)
      << " ns, t_hold=" << fmt("%.1f", best->t_hold_ns) << " ns (" << (swap ? "eps_swap=" : "eps_leak=")
      << fmt("%.3f", err_of(*best)) << ")";
  }
  if (qualify) {
    summary["best_within_error_bound"] = {{"t_ramp_ns", qualify->t_ramp_ns},
                                          {"t_hold_ns", qualify->t_hold_ns},
                                          {"fidelity", qualify->report.fidelity}};
    d << "; best with error<=0.05: F=" << fmt("%.4f", qualify->report.fidelity);
  }
  const bool pass = qualify && qualify->report.fidelity >= f_min;
  summary["pass"] = pass;
  write_file_atomic(out / "summary.json", summary.dump(2) + "\n");
  d << "; surface in " << (out / "sweep.csv").string();
  return {pass, d.str()};
}

Outcome desk_demo(const fs::path& out, int workers) {
  const auto a = demo_search(source_path("configs/desk_sqrt_iswap.json"), out / "sqrt_iswap", workers);
  const auto b = demo_search(source_path("configs/desk_cz.json"), out / "cz", workers);
  return {a.pass && b.pass, a.detail + " | " + b.detail};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app("heligate acceptance checks");
  std::string only;
  bool demo = false;
  int workers = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  std::string demo_out = "acceptance-demo";
  app.add_option("--only", only, "comma-separated criterion numbers");
  app.add_flag("--demo", demo, "run the desk-scale gate demonstration");
  app.add_option("--workers", workers, "threads for sweeps");
  app.add_option("--demo-out", demo_out, "directory for the demonstration surfaces");
  CLI11_PARSE(app, argc, argv);

  struct Criterion {
    int id;
    const char* name;
    std::function<Outcome()> run;
  };
  std::vector<Criterion> all = {
      {1, "fidelity-identities", fidelity_identities},
      {2, "eigensolver-oracle", eigensolver_oracle},
      {3, "propagator-order", propagator_order},
      {4, "zz-phase", zz_phase},
      {5, "warm-start-equivalence", [&] { return warm_start(workers); }},
      {6, "ramp-values", ramp_values},
      {7, "loss-structure", loss_structure},
      {8, "desk-gate-demo", [&] { return desk_demo(demo_out, workers); }},
      {9, "table-round-trip", table_round_trip},
  };
  std::set<int> selected;
  if (demo) {
    selected = {8};
  } else if (!only.empty()) {
    std::stringstream ss(only);
    for (std::string tok; std::getline(ss, tok, ',');) selected.insert(std::stoi(tok));
  } else {
    selected = {1, 2, 3, 4, 5, 6, 7, 9};
  }

  int failures = 0;
  for (const auto& c : all) {
    if (!selected.count(c.id)) {
      if (c.id == 8 && !demo && only.empty()) {
        std::cout << "NOT RUN 8 desk-gate-demo: two-hour search, run `heligate_acceptance --demo`" << std::endl;
      }
      continue;
    }
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::cout << (o.pass ? "PASS " : "FAIL ") << c.id << " " << c.name << ": " << o.detail << " ["
              << fmt("%.1f", secs) << " s]" << std::endl;
    failures += o.pass ? 0 : 1;
  }
  return failures == 0 ? 0 : 1;
}
