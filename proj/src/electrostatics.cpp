#include "heligate/electrostatics.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <numbers>
#include <sstream>

#include "heligate/error.hpp"

namespace heligate {

namespace {

// CODATA 2018
constexpr double kBohrRadiusUm = 5.29177210903e-5;
constexpr double kHartreeGhz = 6.579683920502e6;
constexpr double kGhzPerMeV = 241.798924208;

bool finite(double x) { return std::isfinite(x); }

// Fritsch-Carlson slopes: keeps the interpolant monotone wherever the samples are.
std::vector<double> pchip_slopes(const std::vector<double>& x, const std::vector<double>& y) {
  const std::size_t n = x.size();
  std::vector<double> h(n - 1), delta(n - 1), d(n, 0.0);
  for (std::size_t i = 0; i + 1 < n; ++i) {
    h[i] = x[i + 1] - x[i];
    delta[i] = (y[i + 1] - y[i]) / h[i];
  }
  if (n == 2) {
    d[0] = d[1] = delta[0];
    return d;
  }
  for (std::size_t i = 1; i + 1 < n; ++i) {
    if (delta[i - 1] * delta[i] <= 0.0) {
      d[i] = 0.0;
    } else {
      const double w1 = 2.0 * h[i] + h[i - 1];
      const double w2 = h[i] + 2.0 * h[i - 1];
      d[i] = (w1 + w2) / (w1 / delta[i - 1] + w2 / delta[i]);
    }
  }
  auto end_slope = [](double h0, double h1, double d0, double d1) {
    double s = ((2.0 * h0 + h1) * d0 - h0 * d1) / (h0 + h1);
    if (s * d0 <= 0.0) {
      s = 0.0;
    } else if (d0 * d1 <= 0.0 && std::abs(s) > 3.0 * std::abs(d0)) {
      s = 3.0 * d0;
    }
    return s;
  };
  d[0] = end_slope(h[0], h[1], delta[0], delta[1]);
  d[n - 1] = end_slope(h[n - 2], h[n - 3], delta[n - 2], delta[n - 3]);
  return d;
}

double sqrt2_sigma(double t_ramp_ns) {
  // sqrt(2) * t_ramp / (4 sqrt(2)) = t_ramp / 4
  return t_ramp_ns / 4.0;
}

}  // namespace

UnitSystem UnitSystem::from_coulomb_strength(double kappa) {
  if (!(kappa > 0.0)) throw DomainError("coulomb strength must be positive");
  return make(kappa * kBohrRadiusUm, kHartreeGhz / (kappa * kappa));
}

UnitSystem UnitSystem::make(double length_unit_um, double energy_to_ghz) {
  UnitSystem u;
  u.length_unit_um = length_unit_um;
  u.energy_to_ghz = energy_to_ghz;
  u.time_of_unit_ns = 1.0 / (2.0 * std::numbers::pi * energy_to_ghz);
  u.validate();
  return u;
}

void UnitSystem::validate() const {
  if (!(length_unit_um > 0.0) || !(energy_to_ghz > 0.0) || !(time_of_unit_ns > 0.0) ||
      !finite(length_unit_um) || !finite(energy_to_ghz) || !finite(time_of_unit_ns)) {
    throw DomainError("unit factors must be finite and positive");
  }
  if (std::abs(2.0 * std::numbers::pi * energy_to_ghz * time_of_unit_ns - 1.0) > 1e-12) {
    throw DomainError("time unit inconsistent with energy unit");
  }
}

double UnitSystem::millielectronvolt() const { return kGhzPerMeV / energy_to_ghz; }

ElectrodeLayout ElectrodeLayout::uniform(double pitch_um, double width_um, double depth_um) {
  ElectrodeLayout l;
  for (int k = 0; k < kElectrodeCount; ++k) {
    l.centers_um[k] = (k - (kElectrodeCount - 1) / 2.0) * pitch_um;
    l.widths_um[k] = width_um;
  }
  l.depth_um = depth_um;
  l.validate();
  return l;
}

void ElectrodeLayout::validate() const {
  if (!(depth_um > 0.0) || !finite(depth_um)) throw DomainError("helium depth must be positive");
  for (int k = 0; k < kElectrodeCount; ++k) {
    if (!(widths_um[k] > 0.0) || !finite(widths_um[k]) || !finite(centers_um[k])) {
      throw DomainError("electrode widths must be positive");
    }
    if (k > 0 && !(centers_um[k] > centers_um[k - 1])) {
      throw DomainError("electrode centers must be strictly increasing");
    }
  }
}

CouplingProfile CouplingProfile::analytic(const ElectrodeLayout& layout) {
  layout.validate();
  return CouplingProfile(layout);
}

CouplingProfile CouplingProfile::tabulated(std::vector<double> x_um,
                                           std::array<std::vector<double>, kElectrodeCount> alpha) {
  if (x_um.size() < 3) throw ConfigError("tabulated profile needs at least 3 samples");
  for (std::size_t i = 0; i < x_um.size(); ++i) {
    if (!finite(x_um[i])) throw ConfigError("non-finite x sample");
    if (i > 0 && !(x_um[i] > x_um[i - 1])) throw ConfigError("x samples must be strictly ascending");
  }
  Tabulated t;
  for (int k = 0; k < kElectrodeCount; ++k) {
    if (alpha[k].size() != x_um.size()) throw ConfigError("alpha column length mismatch");
    for (double a : alpha[k]) {
      if (!finite(a) || a < 0.0 || a > 1.0) throw ConfigError("alpha samples must lie in [0,1]");
    }
    t.slope[k] = pchip_slopes(x_um, alpha[k]);
  }
  t.x_um = std::move(x_um);
  t.alpha = std::move(alpha);
  return CouplingProfile(std::move(t));
}

CouplingProfile CouplingProfile::load_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open coupling profile: " + path);
  std::string line;
  if (!std::getline(in, line)) throw ConfigError(path + ": empty file");
  {
    std::stringstream hs(line);
    std::string cell;
    std::vector<std::string> cols;
    while (std::getline(hs, cell, ',')) {
      cell.erase(std::remove_if(cell.begin(), cell.end(), ::isspace), cell.end());
      cols.push_back(cell);
    }
    if (cols.size() != 8 || cols[0] != "x") {
      throw ConfigError(path + ":1: expected header x,alpha1,...,alpha7");
    }
    for (int k = 0; k < kElectrodeCount; ++k) {
      if (cols[k + 1] != "alpha" + std::to_string(k + 1)) {
        throw ConfigError(path + ":1: expected column alpha" + std::to_string(k + 1));
      }
    }
  }
  std::vector<double> xs;
  std::array<std::vector<double>, kElectrodeCount> alpha;
  int lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    std::stringstream ls(line);
    std::string cell;
    std::vector<double> vals;
    while (std::getline(ls, cell, ',')) {
      try {
        std::size_t used = 0;
        vals.push_back(std::stod(cell, &used));
      } catch (const std::exception&) {
        throw ConfigError(path + ":" + std::to_string(lineno) + ": not a number: '" + cell + "'");
      }
    }
    if (vals.size() != 8) throw ConfigError(path + ":" + std::to_string(lineno) + ": expected 8 columns");
    xs.push_back(vals[0]);
    for (int k = 0; k < kElectrodeCount; ++k) alpha[k].push_back(vals[k + 1]);
  }
  try {
    return tabulated(std::move(xs), std::move(alpha));
  } catch (const ConfigError& e) {
    throw ConfigError(path + ": " + e.what());
  }
}

void CouplingProfile::save_csv(const std::string& path, const std::vector<double>& x_um) const {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write " + path);
  out << "x";
  for (int k = 0; k < kElectrodeCount; ++k) out << ",alpha" << k + 1;
  out << "\n";
  out.precision(17);
  for (double x : x_um) {
    out << x;
    for (int k = 0; k < kElectrodeCount; ++k) out << "," << alpha(k, x);
    out << "\n";
  }
}

double CouplingProfile::domain_min_um() const {
  if (auto* t = table()) return t->x_um.front();
  return -std::numeric_limits<double>::infinity();
}

double CouplingProfile::domain_max_um() const {
  if (auto* t = table()) return t->x_um.back();
  return std::numeric_limits<double>::infinity();
}

bool CouplingProfile::contains(double x_um) const {
  return finite(x_um) && x_um >= domain_min_um() && x_um <= domain_max_um();
}

double CouplingProfile::alpha(int k, double x_um) const {
  if (k < 0 || k >= kElectrodeCount) {
    throw DomainError("electrode index " + std::to_string(k) + " out of range [0,7)");
  }
  if (!contains(x_um)) {
    throw DomainError("x = " + std::to_string(x_um) + " um outside coupling profile domain");
  }
  if (auto* l = layout()) {
    // Grounded-strip model: potential of a strip held at V_k seen through the helium layer.
    const double c = l->centers_um[k];
    const double hw = 0.5 * l->widths_um[k];
    const double d = l->depth_um;
    return (std::atan((x_um - c + hw) / d) - std::atan((x_um - c - hw) / d)) / std::numbers::pi;
  }
  const auto& t = *table();
  const auto& xs = t.x_um;
  auto it = std::upper_bound(xs.begin(), xs.end(), x_um);
  std::size_t i = it == xs.begin() ? 0 : static_cast<std::size_t>(it - xs.begin()) - 1;
  if (i >= xs.size() - 1) i = xs.size() - 2;
  const double h = xs[i + 1] - xs[i];
  const double s = (x_um - xs[i]) / h;
  const double s2 = s * s, s3 = s2 * s;
  const double h00 = 2 * s3 - 3 * s2 + 1, h10 = s3 - 2 * s2 + s;
  const double h01 = -2 * s3 + 3 * s2, h11 = s3 - s2;
  const double v = h00 * t.alpha[k][i] + h10 * h * t.slope[k][i] + h01 * t.alpha[k][i + 1] +
                   h11 * h * t.slope[k][i + 1];
  return std::clamp(v, 0.0, 1.0);
}

void VoltageVector::validate() const {
  for (double v : mv) {
    if (!finite(v)) throw DomainError("voltage entries must be finite");
  }
}

VoltageFunction VoltageFunction::make(VoltageVector start, VoltageVector end, VoltageFamily family,
                                      TargetConfig target) {
  VoltageFunction f;
  f.start = start;
  f.end = end;
  f.family = family;
  f.target = target;
  f.lambda_max = (family == VoltageFamily::beta && target == TargetConfig::II) ? kBetaSwapLambda : 1.0;
  f.validate();
  return f;
}

void VoltageFunction::validate() const {
  start.validate();
  end.validate();
  if (!(lambda_max > 0.0 && lambda_max <= 1.0)) throw DomainError("lambda_max must lie in (0,1]");
  if (family == VoltageFamily::beta && target == TargetConfig::II && lambda_max != kBetaSwapLambda) {
    throw DomainError("beta voltage function towards configuration II requires lambda_max = 0.46");
  }
  if (family == VoltageFamily::zeta && lambda_max != 1.0) {
    throw DomainError("zeta voltage function requires lambda_max = 1");
  }
}

RampSchedule::RampSchedule(double ramp_ns, double hold_ns) : t_ramp_ns(ramp_ns), t_hold_ns(hold_ns) {
  validate();
}

double RampSchedule::sigma_ns() const { return t_ramp_ns / (4.0 * std::numbers::sqrt2); }

void RampSchedule::validate() const {
  if (!(t_ramp_ns > 0.0) || !finite(t_ramp_ns)) throw DomainError("t_ramp must be positive");
  if (!(t_hold_ns >= 0.0) || !finite(t_hold_ns)) throw DomainError("t_hold must be non-negative");
}

double alpha_eval(const CouplingProfile& profile, int electrode, double x_um) {
  return profile.alpha(electrode, x_um);
}

double surface_potential(const CouplingProfile& profile, const VoltageVector& v, double x_um,
                         const UnitSystem& units) {
  double sum_mev = 0.0;
  for (int k = 0; k < kElectrodeCount; ++k) sum_mev += profile.alpha(k, x_um) * v.mv[k];
  return -sum_mev * units.millielectronvolt();
}

VoltageVector voltage_at(const VoltageFunction& f, double lambda) {
  if (!(lambda >= 0.0 && lambda <= 1.0)) {
    throw DomainError("lambda = " + std::to_string(lambda) + " outside [0,1]");
  }
  VoltageVector out;
  for (int k = 0; k < kElectrodeCount; ++k) {
    out.mv[k] = (1.0 - lambda) * f.start.mv[k] + lambda * f.end.mv[k];
  }
  return out;
}

double lambda_at(const RampSchedule& s, double lambda_max, double t_ns) {
  const double t_gate = s.t_gate_ns();
  if (!(t_ns >= 0.0 && t_ns <= t_gate)) {
    throw DomainError("t = " + std::to_string(t_ns) + " ns outside [0, t_gate]");
  }
  const double w = sqrt2_sigma(s.t_ramp_ns);
  const double rise = std::erf((t_ns - 0.5 * s.t_ramp_ns) / w);
  const double fall = std::erf((t_ns - t_gate + 0.5 * s.t_ramp_ns) / w);
  return 0.5 * lambda_max * (rise - fall);
}

double lambda_ramp_up(double t_ramp_ns, double lambda_max, double t_ns) {
  const double w = sqrt2_sigma(t_ramp_ns);
  const double rise = std::erf((t_ns - 0.5 * t_ramp_ns) / w);
  return 0.5 * lambda_max * (rise - (-1.0));
}

double lambda_ramp_down(double t_ramp_ns, double lambda_max, double t_ns) {
  const double w = sqrt2_sigma(t_ramp_ns);
  const double fall = std::erf((t_ns - 2.0 * t_ramp_ns + 0.5 * t_ramp_ns) / w);
  return 0.5 * lambda_max * (1.0 - fall);
}

}  // namespace heligate
