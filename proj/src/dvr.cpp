#include "heligate/dvr.hpp"

#include <limits>

#include <algorithm>
#include <cmath>
#include <functional>
#include <numbers>

#include "heligate/error.hpp"

namespace heligate {

DvrGrid DvrGrid::make(double start, double spacing, int count) {
  DvrGrid g{start, spacing, count};
  g.validate();
  return g;
}

DvrGrid DvrGrid::spanning(double lo, double hi, int count) {
  if (count < 2 || !(hi > lo)) throw DomainError("grid span must be non-empty with >= 2 points");
  return make(lo, (hi - lo) / (count - 1), count);
}

Eigen::VectorXd DvrGrid::points() const {
  Eigen::VectorXd p(count);
  for (int i = 0; i < count; ++i) p[i] = point(i);
  return p;
}

void DvrGrid::validate() const {
  if (!(spacing > 0.0) || !std::isfinite(spacing)) throw DomainError("grid spacing must be positive");
  if (count < 2) throw DomainError("grid needs at least 2 points");
  if (!std::isfinite(start)) throw DomainError("grid start must be finite");
}

void TwoBodyBasis::validate() const {
  left.validate();
  right.validate();
  if (!(left.back() < right.start)) throw DomainError("left and right grids overlap");
}

BasisPtr make_basis(DvrGrid left, DvrGrid right) {
  TwoBodyBasis b{left, right};
  b.validate();
  return std::make_shared<const TwoBodyBasis>(b);
}

TwoBodyState::TwoBodyState(BasisPtr basis, Eigen::MatrixXcd coeffs)
    : basis_(std::move(basis)), coeffs_(std::move(coeffs)) {
  if (!basis_) throw BasisMismatch("state without basis");
  if (coeffs_.rows() != basis_->left.count || coeffs_.cols() != basis_->right.count) {
    throw BasisMismatch("coefficient matrix shape does not match basis");
  }
}

TwoBodyState TwoBodyState::zeros(BasisPtr basis) {
  const int nl = basis->left.count, nr = basis->right.count;
  return TwoBodyState(std::move(basis), Eigen::MatrixXcd::Zero(nl, nr));
}

void TwoBodyState::normalize() {
  const double n = norm();
  if (!(n > 0.0) || !std::isfinite(n)) throw DomainError("cannot normalize a zero or non-finite state");
  coeffs_ /= n;
}

bool TwoBodyState::same_basis(const TwoBodyState& other) const {
  return basis_ && other.basis_ && (basis_ == other.basis_ || *basis_ == *other.basis_);
}

std::complex<double> inner(const TwoBodyState& a, const TwoBodyState& b) {
  if (!a.same_basis(b)) throw BasisMismatch("inner product of states on different bases");
  return (a.coeffs().conjugate().cwiseProduct(b.coeffs())).sum();
}

Eigen::MatrixXd kinetic_matrix(const DvrGrid& grid) {
  grid.validate();
  const int n = grid.count;
  const double inv_h2 = 1.0 / (grid.spacing * grid.spacing);
  Eigen::MatrixXd t(n, n);
  for (int i = 0; i < n; ++i) {
    t(i, i) = std::numbers::pi * std::numbers::pi / 6.0 * inv_h2;
    for (int j = 0; j < i; ++j) {
      const int d = i - j;
      const double v = ((d % 2 == 0) ? 1.0 : -1.0) * inv_h2 / (double(d) * d);
      t(i, j) = v;
      t(j, i) = v;
    }
  }
  return t;
}

Eigen::MatrixXd coulomb_diagonal(const TwoBodyBasis& basis, double kappa, double epsilon) {
  if (!(epsilon > 0.0)) throw DomainError("shielding parameter must be positive");
  const int nl = basis.left.count, nr = basis.right.count;
  Eigen::MatrixXd u(nl, nr);
  for (int b = 0; b < nr; ++b) {
    const double xr = basis.right.point(b);
    for (int a = 0; a < nl; ++a) {
      const double dx = basis.left.point(a) - xr;
      u(a, b) = kappa / std::sqrt(dx * dx + epsilon * epsilon);
    }
  }
  return u;
}

std::pair<Eigen::VectorXd, Eigen::VectorXd> potential_diagonals(const TwoBodyBasis& basis,
                                                                const CouplingProfile& profile,
                                                                const VoltageVector& v,
                                                                const UnitSystem& units) {
  auto sample = [&](const DvrGrid& g) {
    Eigen::VectorXd out(g.count);
    for (int i = 0; i < g.count; ++i) out[i] = surface_potential(profile, v, units.to_um(g.point(i)), units);
    return out;
  };
  return {sample(basis.left), sample(basis.right)};
}

OperatorCache::OperatorCache(BasisPtr basis, double kappa, double epsilon) {
  if (!basis) throw BasisMismatch("operator cache without basis");
  basis->validate();
  if (!(kappa >= 0.0)) throw DomainError("coulomb strength must be non-negative");
  auto f = std::make_shared<Fixed>();
  f->kinetic_left = kinetic_matrix(basis->left);
  f->kinetic_right = kinetic_matrix(basis->right);
  f->coulomb = coulomb_diagonal(*basis, kappa, epsilon);
  f->kappa = kappa;
  f->epsilon = epsilon;
  f->basis = std::move(basis);
  fixed_ = std::move(f);
  set_potentials(Eigen::VectorXd::Zero(fixed_->basis->left.count),
                 Eigen::VectorXd::Zero(fixed_->basis->right.count));
}

void OperatorCache::set_potentials(Eigen::VectorXd left, Eigen::VectorXd right) {
  if (left.size() != basis().left.count || right.size() != basis().right.count) {
    throw BasisMismatch("potential vector length does not match grid");
  }
  potential_left_ = std::move(left);
  potential_right_ = std::move(right);
  local_ = fixed_->coulomb;
  local_.colwise() += potential_left_;
  local_.rowwise() += potential_right_.transpose();
}

Eigen::MatrixXd OperatorCache::diagonal() const {
  Eigen::MatrixXd d = local_;
  d.colwise() += fixed_->kinetic_left.diagonal();
  d.rowwise() += fixed_->kinetic_right.diagonal().transpose();
  return d;
}

Eigen::MatrixXd OperatorCache::dense() const {
  const int nl = basis().left.count, nr = basis().right.count;
  const int n = nl * nr;
  Eigen::MatrixXd h = Eigen::MatrixXd::Zero(n, n);
  // column-major flattening: index = a + nl * b
  for (int b = 0; b < nr; ++b) {
    for (int a = 0; a < nl; ++a) {
      const int row = a + nl * b;
      for (int a2 = 0; a2 < nl; ++a2) h(row, a2 + nl * b) += kinetic_left()(a, a2);
      for (int b2 = 0; b2 < nr; ++b2) h(row, a + nl * b2) += kinetic_right()(b, b2);
      h(row, row) += local_(a, b);
    }
  }
  return h;
}

TwoBodyState apply_hamiltonian(const OperatorCache& cache, const TwoBodyState& state) {
  if (!state.basis_ptr() || !(state.basis() == cache.basis())) {
    throw BasisMismatch("state basis does not match operator cache");
  }
  Eigen::MatrixXcd out(state.coeffs().rows(), state.coeffs().cols());
  cache.apply(state.coeffs(), out);
  return TwoBodyState(state.basis_ptr(), std::move(out));
}

Eigen::MatrixXd one_body_hamiltonian(const DvrGrid& grid, const Eigen::VectorXd& potential) {
  if (potential.size() != grid.count) throw BasisMismatch("potential length does not match grid");
  Eigen::MatrixXd h = kinetic_matrix(grid);
  h.diagonal() += potential;
  return h;
}

namespace {

constexpr double kGolden = 0.3819660112501051;

// Golden-section search for the minimum of f on [a, b].
double golden_minimize(const std::function<double(double)>& f, double a, double b) {
  double x1 = a + kGolden * (b - a), x2 = b - kGolden * (b - a);
  double f1 = f(x1), f2 = f(x2);
  for (int it = 0; it < 200 && (b - a) > 1e-12 * (1.0 + std::abs(a)); ++it) {
    if (f1 < f2) {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = a + kGolden * (b - a);
      f1 = f(x1);
    } else {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = b - kGolden * (b - a);
      f2 = f(x2);
    }
  }
  return 0.5 * (a + b);
}

// First crossing of f(x) = level walking from x0 in direction dir, bounded by limit.
double turning_point(const std::function<double(double)>& f, double x0, double dir, double level,
                     double limit, double step) {
  double x = x0;
  while (true) {
    double next = x + dir * step;
    if ((dir > 0 && next >= limit) || (dir < 0 && next <= limit)) return limit;
    if (f(next) >= level) {
      double lo = x, hi = next;
      for (int i = 0; i < 80; ++i) {
        double mid = 0.5 * (lo + hi);
        (f(mid) >= level ? hi : lo) = mid;
      }
      return 0.5 * (lo + hi);
    }
    x = next;
  }
}

}  // namespace

WellGeometry locate_wells(const DeviceModel& device, const VoltageVector& idle) {
  const auto& units = device.units;
  double lo_um, hi_um;
  if (auto* l = device.profile.layout()) {
    lo_um = l->centers_um.front() - 1.0;
    hi_um = l->centers_um.back() + 1.0;
  } else {
    lo_um = device.profile.domain_min_um();
    hi_um = device.profile.domain_max_um();
  }
  const double lo = units.from_um(lo_um), hi = units.from_um(hi_um);
  auto v = [&](double x) { return surface_potential(device.profile, idle, units.to_um(x), units); };

  const int samples = 4001;
  const double h = (hi - lo) / (samples - 1);
  std::vector<double> vals(samples);
  for (int i = 0; i < samples; ++i) vals[i] = v(lo + i * h);
  std::vector<int> minima;
  for (int i = 1; i + 1 < samples; ++i) {
    if (vals[i] < vals[i - 1] && vals[i] <= vals[i + 1]) minima.push_back(i);
  }
  if (minima.size() < 2) throw DomainError("idle potential does not form two wells");
  std::sort(minima.begin(), minima.end(), [&](int a, int b) { return vals[a] < vals[b]; });
  int il = std::min(minima[0], minima[1]), ir = std::max(minima[0], minima[1]);

  WellGeometry w;
  w.left_minimum = golden_minimize(v, lo + (il - 1) * h, lo + (il + 1) * h);
  w.right_minimum = golden_minimize(v, lo + (ir - 1) * h, lo + (ir + 1) * h);
  int ib = il;
  for (int i = il; i <= ir; ++i) {
    if (vals[i] > vals[ib]) ib = i;
  }
  w.barrier = golden_minimize([&](double x) { return -v(x); }, lo + std::max(ib - 1, il) * h,
                              lo + std::min(ib + 1, ir) * h);

  auto curvature = [&](double x) {
    const double d = 1e-3;
    return (v(x + d) - 2.0 * v(x) + v(x - d)) / (d * d);
  };
  auto harmonic_length = [&](double x) {
    const double c = curvature(x);
    if (!(c > 0.0)) throw DomainError("well minimum without positive curvature");
    return std::pow(c, -0.25);
  };
  w.left_length = harmonic_length(w.left_minimum);
  w.right_length = harmonic_length(w.right_minimum);

  // Classical turning points of the n = 2 level, E = v_min + 5/2 omega.
  auto turning = [&](double xmin, double len, double inner_limit, double outer_limit, double out[2]) {
    const double omega = 1.0 / (len * len);
    const double level = v(xmin) + 2.5 * omega;
    const double step = 0.05 * len;
    const double a = turning_point(v, xmin, -1.0, level, std::min(inner_limit, outer_limit), step);
    const double b = turning_point(v, xmin, +1.0, level, std::max(inner_limit, outer_limit), step);
    out[0] = a;
    out[1] = b;
  };
  turning(w.left_minimum, w.left_length, lo, w.barrier, w.left_turning);
  turning(w.right_minimum, w.right_length, w.barrier, hi, w.right_turning);
  return w;
}

BasisPtr auto_basis(const DeviceModel& device, const VoltageVector& idle, const GridOptions& opts) {
  const VoltageVector one[1] = {idle};
  return auto_basis(device, std::span<const VoltageVector>(one), opts);
}

BasisPtr auto_basis(const DeviceModel& device, std::span<const VoltageVector> configs, const GridOptions& opts) {
  if (opts.points_per_well < 2) throw DomainError("need at least 2 points per well");
  if (configs.empty()) throw DomainError("auto_basis needs at least one voltage vector");
  const double dmin = device.units.from_um(device.profile.domain_min_um());
  const double dmax = device.units.from_um(device.profile.domain_max_um());

  double l_lo = std::numeric_limits<double>::infinity(), l_hi = -l_lo, r_lo = l_lo, r_hi = -l_lo;
  double split = 0.0, left_max = -l_lo, right_min = l_lo;
  for (std::size_t i = 0; i < configs.size(); ++i) {
    const WellGeometry w = locate_wells(device, configs[i]);
    if (i == 0) split = w.barrier;
    left_max = std::max(left_max, w.left_minimum);
    right_min = std::min(right_min, w.right_minimum);
    l_lo = std::min(l_lo, w.left_turning[0] - opts.margin_lengths * w.left_length);
    l_hi = std::max(l_hi, w.left_turning[1] + opts.margin_lengths * w.left_length);
    r_lo = std::min(r_lo, w.right_turning[0] - opts.margin_lengths * w.right_length);
    r_hi = std::max(r_hi, w.right_turning[1] + opts.margin_lengths * w.right_length);
  }
  if (!(left_max < right_min)) throw DomainError("wells of the voltage configurations overlap");
  split = std::clamp(split, left_max, right_min);
  l_lo = std::max(l_lo, dmin);
  r_hi = std::min(r_hi, dmax);
  const double gap = 0.25 * std::min((l_hi - l_lo), (r_hi - r_lo)) / (opts.points_per_well - 1);
  l_hi = std::min(l_hi, split - gap);
  r_lo = std::max(r_lo, split + gap);
  return make_basis(DvrGrid::spanning(l_lo, l_hi, opts.points_per_well),
                    DvrGrid::spanning(r_lo, r_hi, opts.points_per_well));
}

}  // namespace heligate
