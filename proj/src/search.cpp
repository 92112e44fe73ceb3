#include "heligate/search.hpp"

#include <atomic>
#include <chrono>
#include <cmath>
#include <mutex>
#include <thread>

#include "heligate/error.hpp"

namespace heligate {

namespace {

constexpr double kGridTol = 1e-6;

bool on_dt_grid(double t, double dt) {
  const double k = t / dt;
  return std::abs(k - std::round(k)) <= kGridTol;
}

void check_ascending(const std::vector<double>& v, const char* what) {
  if (v.empty()) throw ConfigError(std::string(what) + " list is empty");
  for (std::size_t i = 1; i < v.size(); ++i) {
    if (!(v[i] > v[i - 1])) throw ConfigError(std::string(what) + " values must be strictly ascending");
  }
}

GateMatrix overlaps(std::span<const TwoBodyState> bra, std::span<const TwoBodyState> ket) {
  GateMatrix u;
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) u(i, j) = inner(bra[i], ket[j]);
  return u;
}

CellResult finish_cell(double tr, double th, const GateMatrix& u, GateKind target) {
  CellResult c;
  c.t_ramp_ns = tr;
  c.t_hold_ns = th;
  c.u = u;
  if (!u.allFinite()) {
    c.error = "non-finite gate matrix";
    return c;
  }
  c.report = optimize_rotations(u, target_gate(target));
  c.ok = true;
  return c;
}

CellResult failed_cell(double tr, double th, const std::string& msg) {
  CellResult c;
  c.t_ramp_ns = tr;
  c.t_hold_ns = th;
  c.error = msg;
  return c;
}

// One row of the sweep: fixed ramp, all holds.
void run_row(const GateSystem& sys, const SweepSpec& spec, const SearchOptions& opts, std::size_t r,
             std::vector<CellResult>& out, RowCost& cost) {
  const double tr = spec.ramp_values[r];
  const double lmax = spec.voltage_fn.lambda_max;
  const std::size_t nh = spec.hold_values.size();
  const std::vector<TwoBodyState> phi = sys.qubit_states();
  Trajectory stats;

  // Shared ramp-down: chi_i = S_down^dag Phi_i, so U_ij = <chi_i|psi_j(t_hold)>.
  std::vector<TwoBodyState> chi;
  if (opts.shared_ramp_down && spec.hold_values.back() >= 2.0 * tr) {
    try {
      Propagator adj(sys.device, sys.basis, spec.voltage_fn, spec.dt_ns, sys.cn);
      chi = phi;
      GateTiming down{tr, 0.0, lmax, true};
      adj.run_adjoint(chi, down, 0, step_count(2.0 * tr, spec.dt_ns), 2.0 * tr, stats);
      cost.adjoint_steps = stats.steps;
    } catch (const Error&) {
      chi.clear();
    }
  }

  Propagator ref(sys.device, sys.basis, spec.voltage_fn, spec.dt_ns, sys.cn);
  std::vector<TwoBodyState> psi = phi;
  const GateTiming up{tr, std::numeric_limits<double>::infinity(), lmax};
  long cur = 0;
  for (std::size_t h = 0; h < nh; ++h) {
    const double th = spec.hold_values[h];
    const long sh = std::lround(th / spec.dt_ns);
    try {
      Trajectory fw;
      ref.advance(psi, up, cur, sh, std::numeric_limits<double>::infinity(), fw);
      cost.forward_steps += fw.steps;
      cur = sh;
    } catch (const Error& e) {
      for (std::size_t k = h; k < nh; ++k) {
        out[k] = failed_cell(tr, spec.hold_values[k], std::string("ramp-up failed: ") + e.what());
      }
      return;
    }
    try {
      if (!chi.empty() && th >= 2.0 * tr) {
        out[h] = finish_cell(tr, th, overlaps(chi, psi), spec.target);
      } else {
        Propagator branch = ref;
        std::vector<TwoBodyState> fin = psi;
        const double tg = th + 2.0 * tr;
        Trajectory bw;
        branch.advance(fin, GateTiming{tr, th, lmax}, sh, step_count(tg, spec.dt_ns), tg, bw);
        cost.branch_steps += bw.steps;
        out[h] = finish_cell(tr, th, overlaps(phi, fin), spec.target);
      }
    } catch (const Error& e) {
      out[h] = failed_cell(tr, th, e.what());
    }
  }
}

}  // namespace

GateSystem GateSystem::build(const DeviceModel& device, BasisPtr basis, const VoltageVector& idle_voltages,
                             const SpectrumOptions& opts, CnOptions cn) {
  GateSystem sys;
  sys.device = device;
  sys.basis = std::move(basis);
  SpectrumOptions o = opts;
  o.k = std::max(o.k, 6);
  sys.idle = spectrum_at(device, sys.basis, idle_voltages, o);
  sys.cn = cn;
  return sys;
}

std::vector<TwoBodyState> GateSystem::qubit_states() const {
  if (idle.states.size() < 5) throw DomainError("idle spectrum lacks the |11> state");
  std::vector<TwoBodyState> out;
  for (int n : kQubitIndices) out.push_back(idle.states[n]);
  return out;
}

void SweepSpec::validate() const {
  check_ascending(ramp_values, "ramp");
  check_ascending(hold_values, "hold");
  voltage_fn.validate();
  if (!(dt_ns > 0.0) || !std::isfinite(dt_ns)) throw ConfigError("dt must be positive");
  for (double r : ramp_values) {
    if (!(r > 0.0) || !std::isfinite(r)) throw ConfigError("ramp times must be positive");
  }
  for (double h : hold_values) {
    if (!(h >= 0.0) || !std::isfinite(h)) throw ConfigError("hold times must be non-negative");
    if (!on_dt_grid(h, dt_ns)) {
      throw ConfigError("hold time " + std::to_string(h) + " ns is not a multiple of dt");
    }
  }
  if (hold_values.size() > 2) {
    const double step = hold_values[1] - hold_values[0];
    for (std::size_t i = 2; i < hold_values.size(); ++i) {
      if (std::abs(hold_values[i] - hold_values[i - 1] - step) > 1e-9 * std::max(1.0, step)) {
        throw ConfigError("hold values must be uniformly spaced");
      }
    }
  }
}

long SweepResult::total_steps() const {
  long n = 0;
  for (const auto& c : row_costs) n += c.forward_steps + c.branch_steps + c.adjoint_steps;
  return n;
}

GateMatrix gate_matrix_cold(const GateSystem& sys, const VoltageFunction& f, double t_ramp_ns, double t_hold_ns,
                            double dt_ns, long* steps) {
  Propagator p(sys.device, sys.basis, f, dt_ns, sys.cn);
  const std::vector<TwoBodyState> phi = sys.qubit_states();
  std::vector<TwoBodyState> psi = phi;
  const double tg = t_hold_ns + 2.0 * t_ramp_ns;
  Trajectory stats;
  p.advance(psi, GateTiming{t_ramp_ns, t_hold_ns, f.lambda_max}, 0, step_count(tg, dt_ns), tg, stats);
  if (steps) *steps = stats.steps;
  return overlaps(phi, psi);
}

CellResult evaluate_cell(const GateSystem& sys, const SweepSpec& spec, double t_ramp_ns, double t_hold_ns) {
  try {
    return finish_cell(t_ramp_ns, t_hold_ns, gate_matrix_cold(sys, spec.voltage_fn, t_ramp_ns, t_hold_ns, spec.dt_ns),
                       spec.target);
  } catch (const Error& e) {
    return failed_cell(t_ramp_ns, t_hold_ns, e.what());
  }
}

SweepResult grid_search(const GateSystem& sys, const SweepSpec& spec, const SearchOptions& opts) {
  spec.validate();
  const auto t0 = std::chrono::steady_clock::now();
  const std::size_t nr = spec.ramp_values.size(), nh = spec.hold_values.size();
  SweepResult res;
  res.ramp_values = spec.ramp_values;
  res.hold_values = spec.hold_values;
  res.cells.resize(nr * nh);
  res.row_costs.resize(nr);
  res.target = spec.target;
  res.dt_ns = spec.dt_ns;

  std::atomic<std::size_t> next{0};
  std::mutex mu;
  auto worker = [&] {
    std::vector<CellResult> row(nh);
    while (true) {
      const std::size_t r = next.fetch_add(1);
      if (r >= nr) break;
      RowCost cost;
      try {
        run_row(sys, spec, opts, r, row, cost);
      } catch (const std::exception& e) {
        for (std::size_t h = 0; h < nh; ++h) row[h] = failed_cell(spec.ramp_values[r], spec.hold_values[h], e.what());
      }
      std::lock_guard lock(mu);
      std::copy(row.begin(), row.end(), res.cells.begin() + static_cast<std::ptrdiff_t>(r * nh));
      res.row_costs[r] = cost;
      if (opts.on_row) opts.on_row(r, res);
    }
  };
  const int nw = std::max(1, std::min<int>(opts.workers, static_cast<int>(nr)));
  if (nw == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int i = 0; i < nw; ++i) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }

  for (std::size_t i = 0; i < res.cells.size(); ++i) {
    const auto& c = res.cells[i];
    if (!c.ok) continue;
    if (!res.optimum) {
      res.optimum = i;
      continue;
    }
    const auto& b = res.cells[*res.optimum];
    const double tc = c.t_hold_ns + 2.0 * c.t_ramp_ns, tb = b.t_hold_ns + 2.0 * b.t_ramp_ns;
    if (c.report.fidelity > b.report.fidelity || (c.report.fidelity == b.report.fidelity && tc < tb)) {
      res.optimum = i;
    }
  }
  res.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return res;
}

long cold_step_count(const SweepSpec& spec) {
  long n = 0;
  for (double r : spec.ramp_values)
    for (double h : spec.hold_values) n += 4 * step_count(h + 2.0 * r, spec.dt_ns);
  return n;
}

std::vector<double> uniform_values(double lo, double hi, double step) {
  if (!(step > 0.0)) throw ConfigError("grid step must be positive");
  if (hi < lo) throw ConfigError("grid upper bound below lower bound");
  const long n = static_cast<long>(std::floor((hi - lo) / step + 1e-9));
  std::vector<double> v;
  v.reserve(n + 1);
  for (long i = 0; i <= n; ++i) v.push_back(lo + i * step);
  return v;
}

SensitivityResult sensitivity_sweep(const GateSystem& sys, double center_ramp_ns, double center_hold_ns,
                                    double window_ns, double resolution_ns, const SweepSpec& base,
                                    const SearchOptions& opts) {
  if (!(window_ns >= 0.0)) throw ConfigError("sensitivity window must be non-negative");
  long half = 0;
  if (window_ns > 0.0) {
    if (!(resolution_ns > 0.0)) throw ConfigError("sensitivity resolution must be positive");
    const double q = window_ns / resolution_ns;
    if (std::abs(q - std::round(q)) > 1e-9 * std::max(1.0, q)) {
      throw ConfigError("resolution must divide the sensitivity window");
    }
    half = std::lround(q);
  }
  SweepSpec spec = base;
  spec.ramp_values.clear();
  spec.hold_values.clear();
  for (long i = -half; i <= half; ++i) {
    const double r = center_ramp_ns + static_cast<double>(i) * resolution_ns;
    if (r > 1e-12) spec.ramp_values.push_back(i == 0 ? center_ramp_ns : r);
    double h = center_hold_ns + static_cast<double>(i) * resolution_ns;
    if (std::abs(h) < 1e-12) h = 0.0;
    if (h >= 0.0) spec.hold_values.push_back(i == 0 ? center_hold_ns : h);
  }
  SensitivityResult out;
  out.map = grid_search(sys, spec, opts);
  const std::size_t nh = spec.hold_values.size();
  std::size_t rc = 0, hc = 0;
  for (std::size_t i = 0; i < spec.ramp_values.size(); ++i)
    if (spec.ramp_values[i] == center_ramp_ns) rc = i;
  for (std::size_t i = 0; i < nh; ++i)
    if (spec.hold_values[i] == center_hold_ns) hc = i;
  for (std::size_t i = 0; i < spec.ramp_values.size(); ++i) out.ramp_section.push_back(out.map.cell(i, hc));
  for (std::size_t j = 0; j < nh; ++j) out.hold_section.push_back(out.map.cell(rc, j));
  return out;
}

}  // namespace heligate
