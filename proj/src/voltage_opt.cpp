#include "heligate/voltage_opt.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "heligate/error.hpp"
#include "heligate/optim.hpp"

namespace heligate {

LossConfig parse_loss_config(const std::string& name) {
  if (name == "I" || name == "i" || name == "1") return LossConfig::I;
  if (name == "II" || name == "ii" || name == "2") return LossConfig::II;
  if (name == "III" || name == "iii" || name == "3") return LossConfig::III;
  if (name == "zeta" || name == "zeta_only") return LossConfig::zeta_only;
  throw ConfigError("unknown loss configuration '" + name + "' (expected I, II, III or zeta)");
}

std::string to_string(LossConfig c) {
  switch (c) {
    case LossConfig::zeta_only: return "zeta";
    case LossConfig::I: return "I";
    case LossConfig::II: return "II";
    case LossConfig::III: return "III";
  }
  return "zeta";
}

double hinge(double gap, double threshold) {
  const double d = threshold - gap;
  return d > 0.0 ? d * d : 0.0;
}

namespace {

std::size_t extra_terms(LossConfig c) {
  switch (c) {
    case LossConfig::zeta_only: return 0;
    case LossConfig::I: return 2;
    case LossConfig::II: return 3;
    case LossConfig::III: return 4;
  }
  return 0;
}

}  // namespace

LossSpec LossSpec::defaults(LossConfig config) {
  LossSpec s;
  s.config = config;
  switch (config) {
    case LossConfig::zeta_only: break;
    case LossConfig::I: s.weights = {1e-2, 1e-2}; break;
    case LossConfig::II: s.weights = {1e-4, 1e-2, 1e-2}; break;
    case LossConfig::III: s.weights = {1.0, 1.0, 1.0, 1e4}; break;
  }
  return s;
}

void LossSpec::validate() const {
  if (weights.size() != extra_terms(config)) {
    throw ConfigError("configuration " + to_string(config) + " takes " + std::to_string(extra_terms(config)) +
                      " weights, got " + std::to_string(weights.size()));
  }
  for (double w : weights) {
    if (!(w >= 0.0) || !std::isfinite(w)) throw ConfigError("loss weights must be non-negative");
  }
  for (double t : {band_low_ghz, band_high_ghz, min_detuning_ghz, min_gap_ghz}) {
    if (!(t > 0.0) || !std::isfinite(t)) throw ConfigError("loss thresholds must be positive");
  }
  if (!(band_high_ghz > band_low_ghz)) throw ConfigError("frequency band is empty");
}

LossBreakdown loss_from_energies(const LossSpec& spec, std::span<const double> e) {
  spec.validate();
  if (e.size() < 6) throw DomainError("loss needs six energies");
  LossBreakdown b;
  b.energies_ghz.assign(e.begin(), e.begin() + 6);
  b.zeta_ghz = e[4] - e[2] - e[1] + e[0];
  auto add = [&](std::string name, double w, double raw) { b.terms.push_back({std::move(name), w, raw, w * raw}); };
  add("zeta^2", 1.0, b.zeta_ghz * b.zeta_ghz);
  const auto& w = spec.weights;
  switch (spec.config) {
    case LossConfig::zeta_only:
      break;
    case LossConfig::I: {
      const double f1 = e[1] - e[0], f2 = e[2] - e[0];
      auto band = [&](double f) { return hinge(f, spec.band_low_ghz) + hinge(spec.band_high_ghz, f); };
      add("band", w[0], band(f1) + band(f2));
      add("detuning", w[1], hinge(std::abs(f2 - f1), spec.min_detuning_ghz));
      break;
    }
    case LossConfig::II:
      add("(E2-E1)^2", w[0], (e[2] - e[1]) * (e[2] - e[1]));
      add("gap43", w[1], hinge(e[4] - e[3], spec.min_gap_ghz));
      add("gap54", w[2], hinge(e[5] - e[4], spec.min_gap_ghz));
      break;
    case LossConfig::III: {
      const double d54 = (e[5] - e[4]) * (e[5] - e[4]);
      const double d43 = (e[4] - e[3]) * (e[4] - e[3]);
      add("dE54", w[0], d54);
      add("dE43", w[1], d43);
      add("(dE54-dE43)^2", w[2], (d54 - d43) * (d54 - d43));
      add("gap21", w[3], hinge(e[2] - e[1], spec.min_gap_ghz));
      break;
    }
  }
  for (const auto& t : b.terms) b.total += t.value;
  return b;
}

SpectrumEvaluator device_evaluator(const DeviceModel& device, const GridOptions& grid, const SpectrumOptions& opts) {
  return [device, grid, opts](const VoltageVector& v) {
    const BasisPtr basis = auto_basis(device, v, grid);
    SpectrumOptions o = opts;
    o.k = std::max(o.k, 6);
    const EigenSolution sol = spectrum_at(device, basis, v, o);
    std::vector<double> e;
    for (double x : sol.energies) e.push_back(device.units.to_ghz(x));
    return e;
  };
}

SpectrumEvaluator pinned_wells(SpectrumEvaluator inner, const DeviceModel& device, const VoltageVector& reference,
                               double max_shift_um) {
  const WellGeometry ref = locate_wells(device, reference);
  return [inner = std::move(inner), device, ref, max_shift_um](const VoltageVector& v) {
    const WellGeometry w = locate_wells(device, v);
    const double shift = device.units.to_um(
        std::max(std::abs(w.left_minimum - ref.left_minimum), std::abs(w.right_minimum - ref.right_minimum)));
    if (shift > max_shift_um) throw DomainError("wells moved by " + std::to_string(shift) + " um");
    return inner(v);
  };
}

LossBreakdown loss_value(const LossSpec& spec, const SpectrumEvaluator& eval, const VoltageVector& v) {
  const std::vector<double> e = eval(v);
  return loss_from_energies(spec, e);
}

OptimizationTrace optimize_voltages(const VoltageVector& initial, const LossSpec& spec, int budget,
                                    const SpectrumEvaluator& eval, const OptimizerOptions& opts) {
  spec.validate();
  if (budget < 0) throw ConfigError("optimizer budget must be non-negative");
  if (!(opts.box_mv > 0.0)) throw ConfigError("search box must be positive");
  if (opts.steps_mv.empty()) throw ConfigError("optimizer needs at least one simplex size");
  constexpr int n = kElectrodeCount;

  OptimizationTrace trace;
  trace.best = initial;
  trace.best_breakdown = loss_value(spec, eval, initial);
  double best = trace.best_breakdown.total;
  trace.iterates.push_back({initial, best, 0});
  if (budget == 0) return trace;

  auto to_voltage = [&](const std::vector<double>& x) {
    VoltageVector v = initial;
    for (int k = 0; k < n; ++k) v.mv[k] += std::clamp(x[k], -opts.box_mv, opts.box_mv);
    return v;
  };
  auto objective = [&](const std::vector<double>& x) {
    double excess = 0.0;
    for (int k = 0; k < n; ++k) {
      const double d = std::abs(x[k]) - opts.box_mv;
      if (d > 0.0) excess += d * d;
    }
    const VoltageVector v = to_voltage(x);
    ++trace.evaluations;
    LossBreakdown b;
    try {
      b = loss_value(spec, eval, v);
    } catch (const Error&) {
      ++trace.failed_evaluations;
      return std::numeric_limits<double>::infinity();
    }
    if (excess == 0.0 && b.total < best) {
      best = b.total;
      trace.best = v;
      trace.best_breakdown = b;
      trace.iterates.push_back({v, b.total, trace.evaluations});
    }
    return b.total + excess;
  };

  std::mt19937_64 rng(opts.seed);
  std::normal_distribution<double> normal;
  std::vector<double> x(n, 0.0);
  std::size_t stalled = 0;
  for (std::size_t cycle = 0; trace.evaluations + n + 1 < budget && stalled < opts.steps_mv.size(); ++cycle) {
    SimplexOptions so;
    so.initial_step = opts.steps_mv[cycle % opts.steps_mv.size()];
    so.f_tol = 1e-14 * std::max(1.0, best);
    so.x_tol = 1e-3 * so.initial_step;
    so.max_evaluations = budget - trace.evaluations;
    if (cycle > 0) {
      // Random orthonormal simplex orientation for restarts.
      Eigen::MatrixXd g(n, n);
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) g(i, j) = normal(rng);
      const Eigen::MatrixXd q = Eigen::HouseholderQR<Eigen::MatrixXd>(g).householderQ();
      so.directions.assign(n, std::vector<double>(n));
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) so.directions[i][j] = q(j, i);
    }
    for (int k = 0; k < n; ++k) x[k] = trace.best.mv[k] - initial.mv[k];
    const double before = best;
    nelder_mead(objective, x, so);
    stalled = best < before - 1e-14 * std::max(1.0, std::abs(before)) ? 0 : stalled + 1;
  }
  trace.budget_exhausted = trace.evaluations + n + 1 >= budget && stalled < opts.steps_mv.size();
  return trace;
}

}  // namespace heligate
