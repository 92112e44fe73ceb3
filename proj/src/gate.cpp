#include "heligate/gate.hpp"

#include <cmath>
#include <numbers>

#include "heligate/error.hpp"
#include "heligate/optim.hpp"
#include "heligate/spectrum.hpp"

namespace heligate {

namespace {

using cd = std::complex<double>;
constexpr double kPi = std::numbers::pi;

cd phase_factor(double a) { return std::polar(1.0, a); }

}  // namespace

double wrap_angle(double a) {
  if (!std::isfinite(a)) return a;
  double r = std::remainder(a, 2.0 * kPi);  // [-pi, pi]
  if (r <= -kPi) r += 2.0 * kPi;
  return r;
}

GateKind parse_gate_kind(const std::string& name) {
  if (name == "sqrt_iswap" || name == "sqrt-iswap" || name == "siswap") return GateKind::sqrt_iswap;
  if (name == "cz") return GateKind::cz;
  if (name == "identity") return GateKind::identity;
  throw ConfigError("unknown gate '" + name + "' (expected sqrt_iswap, cz or identity)");
}

std::string to_string(GateKind kind) {
  switch (kind) {
    case GateKind::sqrt_iswap: return "sqrt_iswap";
    case GateKind::cz: return "cz";
    case GateKind::identity: return "identity";
  }
  return "identity";
}

GateMatrix target_gate(GateKind kind) {
  GateMatrix g = GateMatrix::Identity();
  switch (kind) {
    case GateKind::sqrt_iswap: {
      const double s = 1.0 / std::numbers::sqrt2;
      g(1, 1) = g(2, 2) = s;
      g(1, 2) = g(2, 1) = cd(0.0, s);
      break;
    }
    case GateKind::cz:
      g(3, 3) = -1.0;
      break;
    case GateKind::identity:
      break;
  }
  return g;
}

GateMatrix overlap_gate_matrix(std::span<const TwoBodyState> eigenstates, std::span<const TwoBodyState> finals) {
  if (finals.size() != 4) throw DomainError("gate matrix needs four propagated states");
  std::array<const TwoBodyState*, 4> phi{};
  if (eigenstates.size() == 4) {
    for (int i = 0; i < 4; ++i) phi[i] = &eigenstates[i];
  } else if (eigenstates.size() >= 5) {
    for (int i = 0; i < 4; ++i) phi[i] = &eigenstates[kQubitIndices[i]];
  } else {
    throw DomainError("gate matrix needs the four qubit eigenstates");
  }
  GateMatrix u;
  for (int i = 0; i < 4; ++i) {
    for (int j = 0; j < 4; ++j) {
      if (!phi[i]->same_basis(finals[j])) throw BasisMismatch("eigenstates and propagated states use different bases");
      u(i, j) = inner(*phi[i], finals[j]);
    }
  }
  return u;
}

GateMatrix apply_z_rotations(const GateMatrix& u, const RotationAngles& a) {
  const cd g = phase_factor(a.global_phase);
  const std::array<cd, 4> d = {g, g * phase_factor(a.theta_right), g * phase_factor(a.theta_left),
                               g * phase_factor(a.theta_left + a.theta_right)};
  GateMatrix out = u;
  for (int i = 0; i < 4; ++i) out.row(i) *= d[i];
  return out;
}

double average_fidelity(const GateMatrix& g, const GateMatrix& target) {
  const GateMatrix m = target.adjoint() * g;
  return ((m * m.adjoint()).trace().real() + std::norm(m.trace())) / 20.0;
}

RotationAngles canonical_angles(const GateMatrix& u) {
  for (int i = 0; i < 3; ++i) {
    if (!(std::abs(u(i, i)) > 1e-14)) {
      throw DomainError("canonical angles undefined: U" + std::to_string(i) + std::to_string(i) + " vanishes");
    }
  }
  const double a0 = std::arg(u(0, 0));
  return {wrap_angle(std::arg(u(2, 2)) - a0), wrap_angle(std::arg(u(1, 1)) - a0), wrap_angle(-a0)};
}

GateMatrix canonical_gate(const GateMatrix& u) {
  const RotationAngles c = canonical_angles(u);
  return apply_z_rotations(u, {-c.theta_left, -c.theta_right, c.global_phase});
}

FidelityReport optimize_rotations(const GateMatrix& u, const GateMatrix& target) {
  // Only |Tr(target^dag D U)|^2 = |sum_k d_k W_kk|^2 with W = U target^dag depends on the angles.
  const GateMatrix w = u * target.adjoint();
  const double norm_part = (u * u.adjoint()).trace().real();
  auto trace_term = [&](double tl, double tr) {
    const cd s = w(0, 0) + phase_factor(tr) * w(1, 1) + phase_factor(tl) * w(2, 2) + phase_factor(tl + tr) * w(3, 3);
    return s;
  };
  auto fidelity_at = [&](double tl, double tr) { return (norm_part + std::norm(trace_term(tl, tr))) / 20.0; };
  auto objective = [&](const std::vector<double>& x) { return -fidelity_at(x[0], x[1]); };

  std::vector<std::array<double, 2>> starts;
  try {
    const RotationAngles c = canonical_angles(u);
    starts.push_back({-c.theta_left, -c.theta_right});
  } catch (const DomainError&) {
  }
  double grid_min = 1e300, grid_max = -1e300;
  for (int i = 0; i < 8; ++i) {
    for (int j = 0; j < 8; ++j) {
      const double tl = -kPi + 2.0 * kPi * i / 8.0, tr = -kPi + 2.0 * kPi * j / 8.0;
      const double f = fidelity_at(tl, tr);
      grid_min = std::min(grid_min, f);
      grid_max = std::max(grid_max, f);
      starts.push_back({tl, tr});
    }
  }

  SimplexOptions so;
  so.initial_step = 0.2;
  so.f_tol = 1e-14;
  so.x_tol = 1e-9;
  double best_f = -1.0;
  std::array<double, 2> best{0.0, 0.0};
  for (const auto& s : starts) {
    const double f0 = fidelity_at(s[0], s[1]);
    if (f0 > best_f) {
      best_f = f0;
      best = s;
    }
  }
  for (const auto& s : starts) {
    const SimplexResult r = nelder_mead(objective, {s[0], s[1]}, so);
    if (-r.value > best_f) {
      best_f = -r.value;
      best = {r.x[0], r.x[1]};
    }
  }

  FidelityReport rep;
  rep.angles.theta_left = wrap_angle(best[0]);
  rep.angles.theta_right = wrap_angle(best[1]);
  const cd tr = trace_term(rep.angles.theta_left, rep.angles.theta_right);
  rep.angles.global_phase = std::abs(tr) > 0.0 ? wrap_angle(-std::arg(tr)) : 0.0;
  rep.gate = apply_z_rotations(u, rep.angles);
  rep.fidelity = average_fidelity(rep.gate, target);
  rep.swap_error = swap_error(u);
  rep.leakage_error = leakage_error(u);
  rep.flat_landscape = grid_max - grid_min < 1e-9;
  return rep;
}

double swap_error(const GateMatrix& u) {
  double e = 0.0;
  for (int i = 1; i <= 2; ++i)
    for (int j = 1; j <= 2; ++j) e += std::abs(0.5 - std::norm(u(i, j)));
  return 0.5 * e;
}

double leakage_error(const GateMatrix& u) { return 1.0 - std::norm(u(3, 3)); }

ElementReport elementwise_report(const GateMatrix& u, GateKind kind) {
  const GateMatrix g = canonical_gate(u);
  const GateMatrix t = target_gate(kind);
  ElementReport rep;
  for (int i = 0; i < 4; ++i) {
    for (int j = 0; j < 4; ++j) {
      auto& e = rep[i][j];
      e.amplitude = std::norm(g(i, j));
      e.ideal_amplitude = std::norm(t(i, j));
      e.phase = std::arg(g(i, j));
      const double ideal = std::abs(t(i, j)) > 0.0 ? std::arg(t(i, j)) : 0.0;
      e.phase_deviation = wrap_angle(e.phase - ideal);
    }
  }
  return rep;
}

}  // namespace heligate
