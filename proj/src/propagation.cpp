#include "heligate/propagation.hpp"

#include <algorithm>
#include <cmath>

#include "heligate/error.hpp"

namespace heligate {

namespace {

using cd = std::complex<double>;

Eigen::Map<Eigen::MatrixXcd> as_grid(Eigen::MatrixXcd& cols, Eigen::Index j, Eigen::Index nl, Eigen::Index nr) {
  return Eigen::Map<Eigen::MatrixXcd>(cols.col(j).data(), nl, nr);
}

}  // namespace

CrankNicolson::CrankNicolson(OperatorCache cache, CnOptions opts) : cache_(std::move(cache)), opts_(opts) {
  if (!(opts_.rel_tol > 0.0)) throw DomainError("solver tolerance must be positive");
  if (opts_.max_iterations < 1 || opts_.restart < 1) throw DomainError("solver iteration limits must be positive");
}

void CrankNicolson::set_potentials(const Eigen::VectorXd& left, const Eigen::VectorXd& right, double shift) {
  cache_.set_potentials(left, right);
  shift_ = shift;
  dirty_ = true;
}

void CrankNicolson::refresh() {
  const auto& basis = cache_.basis();
  const int nl = basis.left.count, nr = basis.right.count;
  if (cache_.potential_left().size() != nl || cache_.potential_right().size() != nr) {
    throw DomainError("propagator potentials not set");
  }
  const Eigen::MatrixXd& u = cache_.coulomb();
  coulomb_left_ = u.rowwise().mean();
  coulomb_right_ = u.colwise().mean().transpose() - Eigen::VectorXd::Constant(nr, u.mean());
  ref_left_ = cache_.potential_left();
  ref_right_ = cache_.potential_right();
  Eigen::MatrixXd hl = cache_.kinetic_left();
  hl.diagonal() += ref_left_ + coulomb_left_;
  Eigen::MatrixXd hr = cache_.kinetic_right();
  hr.diagonal() += ref_right_ + coulomb_right_;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> el(hl), er(hr);
  q_left_ = el.eigenvectors();
  q_right_ = er.eigenvectors();
  eig_left_ = el.eigenvalues();
  eig_right_ = er.eigenvalues();
  have_basis_ = true;
  ++rebuilds_;
}

// Splits H into a part diagonal in the reference eigenbasis (including the
// constant part of the potential drift) and a grid-diagonal remainder.
void CrankNicolson::update_split(double tau) {
  if (!have_basis_) refresh();
  Eigen::VectorXd dl = cache_.potential_left() - ref_left_;
  Eigen::VectorXd dr = cache_.potential_right() - ref_right_;
  double ml = dl.mean(), mr = dr.mean();
  dl.array() -= ml;
  dr.array() -= mr;
  if (std::abs(tau) * (dl.cwiseAbs().maxCoeff() + dr.cwiseAbs().maxCoeff()) > opts_.rebuild_threshold) {
    refresh();
    dl.setZero();
    dr.setZero();
    ml = mr = 0.0;
  }
  const Eigen::Index nr = eig_right_.size();
  separable_ = (eig_left_.array() + (ml + mr - shift_)).matrix().replicate(1, nr);
  separable_.rowwise() += eig_right_.transpose();
  correlation_ = cache_.coulomb();
  correlation_.colwise() -= coulomb_left_ - dl;
  correlation_.rowwise() -= (coulomb_right_ - dr).transpose();
  dirty_ = false;
  last_tau_ = std::abs(tau);
}

void CrankNicolson::to_eigen(const Eigen::MatrixXcd& in, Eigen::MatrixXcd& out) const {
  tmp_.noalias() = q_left_.transpose() * in;
  out.noalias() = tmp_ * q_right_;
}

void CrankNicolson::from_eigen(const Eigen::MatrixXcd& in, Eigen::MatrixXcd& out) const {
  tmp_.noalias() = q_left_ * in;
  out.noalias() = tmp_ * q_right_.transpose();
}

// out = y + i tau C (y ./ d), C the correlation part in the eigenbasis.
void CrankNicolson::apply_shifted(const Eigen::MatrixXcd& y, Eigen::MatrixXcd& out, double tau) {
  scaled_ = y.cwiseQuotient(denom_);
  from_eigen(scaled_, work_);
  work_ = work_.cwiseProduct(correlation_);
  to_eigen(work_, out);
  out = y + cd(0.0, tau) * out;
}

StepStats CrankNicolson::step(Eigen::MatrixXcd& c, double dt) {
  const auto& basis = cache_.basis();
  const Eigen::Index nl = basis.left.count, nr = basis.right.count, n = nl * nr;
  if (c.rows() != nl || c.cols() != nr) throw BasisMismatch("state does not match the propagator basis");
  const double tau = 0.5 * dt;
  const cd itau(0.0, tau);
  if (dirty_ || std::abs(tau) > last_tau_) update_split(tau);

  cache_.apply(c, work_);
  work_ -= shift_ * c;
  rhs_ = c - itau * work_;
  to_eigen(rhs_, bhat_);
  denom_ = (itau * separable_.cast<cd>()).array() + 1.0;

  StepStats stats;
  const double bnorm = bhat_.norm();
  if (bnorm == 0.0) {
    c.setZero();
    return stats;
  }
  const double target = opts_.rel_tol * bnorm;
  const int m = opts_.restart;
  if (krylov_.cols() != m + 1 || krylov_.rows() != n) krylov_.resize(n, m + 1);
  Eigen::MatrixXcd h = Eigen::MatrixXcd::Zero(m + 1, m);
  Eigen::VectorXcd g(m + 1), cs(m), sn(m);

  y_ = bhat_;
  bool estimate_converged = false;
  while (!estimate_converged) {
    apply_shifted(y_, r_, tau);
    r_ = bhat_ - r_;
    const double beta = r_.norm();
    stats.residual = beta / bnorm;
    if (beta <= target) break;
    if (stats.iterations >= opts_.max_iterations) {
      throw ConvergenceError("Crank-Nicolson solve: residual " + std::to_string(stats.residual) + " after " +
                                 std::to_string(stats.iterations) + " iterations",
                             stats.residual);
    }
    h.setZero();
    g.setZero();
    g[0] = beta;
    as_grid(krylov_, 0, nl, nr) = r_ / beta;
    int j = 0;
    for (; j < m && stats.iterations < opts_.max_iterations; ++j) {
      ++stats.iterations;
      v_ = as_grid(krylov_, j, nl, nr);
      apply_shifted(v_, w_, tau);
      Eigen::Map<Eigen::VectorXcd> w(w_.data(), n);
      for (int i = 0; i <= j; ++i) {
        h(i, j) = krylov_.col(i).dot(w);
        w -= h(i, j) * krylov_.col(i);
      }
      const double hn = w.norm();
      h(j + 1, j) = hn;
      if (hn > 0.0) krylov_.col(j + 1) = w / hn;
      for (int i = 0; i < j; ++i) {
        const cd a = h(i, j), b = h(i + 1, j);
        h(i, j) = std::conj(cs[i]) * a + std::conj(sn[i]) * b;
        h(i + 1, j) = -sn[i] * a + cs[i] * b;
      }
      const cd a = h(j, j);
      const double rr = std::hypot(std::abs(a), hn);
      cs[j] = rr > 0.0 ? a / rr : cd(1.0);
      sn[j] = rr > 0.0 ? cd(hn / rr) : cd(0.0);
      h(j, j) = rr;
      h(j + 1, j) = 0.0;
      g[j + 1] = -sn[j] * g[j];
      g[j] = std::conj(cs[j]) * g[j];
      if (std::abs(g[j + 1]) <= target || hn == 0.0) {
        stats.residual = std::abs(g[j + 1]) / bnorm;
        estimate_converged = true;
        ++j;
        break;
      }
    }
    const Eigen::VectorXcd coef =
        h.topLeftCorner(j, j).triangularView<Eigen::Upper>().solve(g.head(j));
    Eigen::Map<Eigen::VectorXcd> y(y_.data(), n);
    y.noalias() += krylov_.leftCols(j) * coef;
  }
  scaled_ = y_.cwiseQuotient(denom_);
  from_eigen(scaled_, c);
  return stats;
}

double frame_energy(const OperatorCache& cache) {
  const Eigen::MatrixXd& u = cache.coulomb();
  Eigen::MatrixXd hl = cache.kinetic_left();
  hl.diagonal() += cache.potential_left() + u.rowwise().mean();
  Eigen::MatrixXd hr = cache.kinetic_right();
  hr.diagonal() += cache.potential_right() + u.colwise().mean().transpose();
  hr.diagonal().array() -= u.mean();
  const Eigen::VectorXd el = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(hl, Eigen::EigenvaluesOnly).eigenvalues();
  const Eigen::VectorXd er = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(hr, Eigen::EigenvaluesOnly).eigenvalues();
  if (el.size() < 2 || er.size() < 2) return el[0] + er[0];
  // mean of the four separable qubit levels
  return el[0] + er[0] + 0.5 * (el[1] - el[0] + er[1] - er[0]);
}

TwoBodyState crank_nicolson_step(const OperatorCache& cache, const TwoBodyState& state, double dt,
                                 const CnOptions& opts) {
  if (state.basis() != cache.basis()) throw BasisMismatch("state and operator use different bases");
  CrankNicolson cn(cache, opts);
  cn.set_potentials(cache.potential_left(), cache.potential_right(), frame_energy(cache));
  Eigen::MatrixXcd c = state.coeffs();
  cn.step(c, dt);
  return TwoBodyState(state.basis_ptr(), std::move(c));
}

LambdaPath::LambdaPath(const DeviceModel& device, BasisPtr basis, const VoltageFunction& f)
    : device_(device), basis_(std::move(basis)), fn_(f) {
  fn_.validate();
  std::tie(left0_, right0_) = potential_diagonals(*basis_, device_.profile, fn_.start, device_.units);
  std::tie(left1_, right1_) = potential_diagonals(*basis_, device_.profile, fn_.end, device_.units);
}

std::pair<Eigen::VectorXd, Eigen::VectorXd> LambdaPath::potentials(double lambda) const {
  if (!(lambda >= 0.0 && lambda <= 1.0)) throw DomainError("lambda outside [0, 1]");
  return {(1.0 - lambda) * left0_ + lambda * left1_, (1.0 - lambda) * right0_ + lambda * right1_};
}

double GateTiming::lambda(double t_ns) const {
  if (ramp_down_only) {
    if (!(t_ns >= 0.0 && t_ns <= 2.0 * t_ramp_ns)) throw DomainError("time outside the ramp-down");
    return lambda_ramp_down(t_ramp_ns, lambda_max, t_ns);
  }
  if (open()) {
    if (!(t_ns >= 0.0)) throw DomainError("negative time");
    return lambda_ramp_up(t_ramp_ns, lambda_max, t_ns);
  }
  return lambda_at(RampSchedule(t_ramp_ns, t_hold_ns), lambda_max, t_ns);
}

void PropagationPlan::validate() const {
  schedule.validate();
  voltage_fn.validate();
  if (!(dt_ns > 0.0) || !std::isfinite(dt_ns)) throw DomainError("dt must be positive");
  const double tg = schedule.t_gate_ns();
  if (dt_ns > tg) throw DomainError("dt exceeds the gate duration");
  for (double t : snapshot_times_ns) {
    if (!(t >= 0.0 && t <= tg)) throw DomainError("snapshot time outside [0, t_gate]");
    const double k = t / dt_ns;
    if (std::abs(k - std::round(k)) > 1e-9 * std::max(1.0, k) && std::abs(t - tg) > 1e-12) {
      throw DomainError("snapshot time " + std::to_string(t) + " ns is not on the dt grid");
    }
  }
}

long step_count(double t_end_ns, double dt_ns) {
  if (!(dt_ns > 0.0)) throw DomainError("dt must be positive");
  if (!(t_end_ns > 0.0)) return 0;
  return static_cast<long>(std::ceil(t_end_ns / dt_ns - 1e-9));
}

Propagator::Propagator(const DeviceModel& device, BasisPtr basis, const VoltageFunction& f, double dt_ns,
                       CnOptions opts)
    : path_(device, basis, f), dt_ns_(dt_ns), cn_(OperatorCache(basis, device.kappa, device.epsilon), opts) {
  if (!(dt_ns > 0.0) || !std::isfinite(dt_ns)) throw DomainError("dt must be positive");
  OperatorCache probe(basis, device.kappa, device.epsilon);
  auto [l0, r0] = path_.potentials(0.0);
  probe.set_potentials(l0, r0);
  shift0_ = frame_energy(probe);
  auto [l1, r1] = path_.potentials(1.0);
  probe.set_potentials(l1, r1);
  shift1_ = frame_energy(probe);
}

StepStats Propagator::step_at(Eigen::MatrixXcd& coeffs, double lambda, double dt_step_ns) {
  if (!(lambda == current_lambda_)) {
    auto [l, r] = path_.potentials(lambda);
    cn_.set_potentials(l, r, (1.0 - lambda) * shift0_ + lambda * shift1_);
    current_lambda_ = lambda;
  }
  return cn_.step(coeffs, path_.device().units.from_ns(dt_step_ns));
}

namespace {

std::vector<double> overlap_row(const TwoBodyState& s, std::span<const TwoBodyState> basis) {
  std::vector<double> row;
  row.reserve(basis.size());
  for (const auto& phi : basis) row.push_back(std::norm(inner(phi, s)));
  return row;
}

}  // namespace

void Propagator::run(TwoBodyState& state, const GateTiming& timing, long from, long to, double end_ns,
                     Trajectory& traj, std::span<const long> snapshot_steps, const PropagateOptions& opts) {
  if (state.basis() != *path_.basis()) throw BasisMismatch("state does not match the propagator basis");
  const bool record = !opts.overlap_basis.empty();
  if (record && !traj.overlaps) traj.overlaps.emplace();
  const int every = std::max(1, opts.overlap_every);
  const double n0 = state.norm();
  Eigen::MatrixXcd& c = state.coeffs();
  if (record && traj.overlaps->times_ns.empty()) {
    traj.overlaps->times_ns.push_back(from * dt_ns_);
    traj.overlaps->rows.push_back(overlap_row(state, opts.overlap_basis));
  }
  for (long k = from; k < to; ++k) {
    const double t0 = k * dt_ns_;
    const double t1 = (k + 1 == to && std::isfinite(end_ns)) ? end_ns : (k + 1) * dt_ns_;
    const double lam = timing.lambda(0.5 * (t0 + t1));
    const StepStats st = step_at(c, lam, t1 - t0);
    ++traj.steps;
    traj.solver_iterations += st.iterations;
    traj.max_residual = std::max(traj.max_residual, st.residual);
    if (!c.allFinite()) throw ConvergenceError("non-finite amplitudes at t = " + std::to_string(t1) + " ns", 0.0);
    if (std::find(snapshot_steps.begin(), snapshot_steps.end(), k + 1) != snapshot_steps.end()) {
      traj.snapshots.push_back(Snapshot{t1, k + 1, dt_ns_, timing, path_.voltage_fn(), state});
    }
    if (record && ((k + 1) % every == 0 || k + 1 == to)) {
      traj.overlaps->times_ns.push_back(t1);
      traj.overlaps->rows.push_back(overlap_row(state, opts.overlap_basis));
    }
    traj.end_time_ns = t1;
  }
  traj.norm_drift = std::max(traj.norm_drift, std::abs(state.norm() - n0));
}

void Propagator::advance(std::span<TwoBodyState> states, const GateTiming& timing, long from, long to,
                         double end_ns, Trajectory& stats) {
  for (auto& s : states) {
    if (s.basis() != *path_.basis()) throw BasisMismatch("state does not match the propagator basis");
  }
  for (long k = from; k < to; ++k) {
    const double t0 = k * dt_ns_;
    const double t1 = (k + 1 == to && std::isfinite(end_ns)) ? end_ns : (k + 1) * dt_ns_;
    const double lam = timing.lambda(0.5 * (t0 + t1));
    for (auto& s : states) {
      const StepStats st = step_at(s.coeffs(), lam, t1 - t0);
      ++stats.steps;
      stats.solver_iterations += st.iterations;
      stats.max_residual = std::max(stats.max_residual, st.residual);
      if (!s.coeffs().allFinite()) {
        throw ConvergenceError("non-finite amplitudes at t = " + std::to_string(t1) + " ns", 0.0);
      }
    }
    stats.end_time_ns = t1;
  }
}

void Propagator::run_adjoint(std::span<TwoBodyState> states, const GateTiming& timing, long from, long to,
                             double end_ns, Trajectory& stats) {
  for (auto& s : states) {
    if (s.basis() != *path_.basis()) throw BasisMismatch("state does not match the propagator basis");
  }
  for (long k = to - 1; k >= from; --k) {
    const double t0 = k * dt_ns_;
    const double t1 = (k + 1 == to && std::isfinite(end_ns)) ? end_ns : (k + 1) * dt_ns_;
    const double lam = timing.lambda(0.5 * (t0 + t1));
    for (auto& s : states) {
      const StepStats st = step_at(s.coeffs(), lam, -(t1 - t0));
      ++stats.steps;
      stats.solver_iterations += st.iterations;
      stats.max_residual = std::max(stats.max_residual, st.residual);
    }
  }
}

Trajectory propagate(const DeviceModel& device, const BasisPtr& basis, const PropagationPlan& plan,
                     const TwoBodyState& initial, const PropagateOptions& opts) {
  plan.validate();
  if (initial.basis() != *basis) throw BasisMismatch("initial state does not match the basis");
  Propagator prop(device, basis, plan.voltage_fn, plan.dt_ns, opts.cn);
  const double tg = plan.schedule.t_gate_ns();
  const long n = step_count(tg, plan.dt_ns);
  std::vector<long> snaps;
  for (double t : plan.snapshot_times_ns) snaps.push_back(std::min(n, std::lround(t / plan.dt_ns)));
  Trajectory traj;
  TwoBodyState state = initial;
  if (std::find(snaps.begin(), snaps.end(), 0L) != snaps.end()) {
    traj.snapshots.push_back(Snapshot{0.0, 0, plan.dt_ns, plan.timing(), plan.voltage_fn, state});
  }
  prop.run(state, plan.timing(), 0, n, tg, traj, snaps, opts);
  traj.final_state = std::move(state);
  return traj;
}

Trajectory resume_from(const DeviceModel& device, const BasisPtr& basis, const Snapshot& snapshot,
                       const PropagationPlan& plan, const PropagateOptions& opts) {
  plan.validate();
  if (snapshot.state.basis() != *basis) throw BasisMismatch("snapshot does not match the basis");
  if (snapshot.dt_ns != plan.dt_ns) throw DomainError("snapshot was taken with a different dt");
  const GateTiming timing = plan.timing();
  if (snapshot.timing.t_ramp_ns != timing.t_ramp_ns || snapshot.timing.lambda_max != timing.lambda_max) {
    throw DomainError("snapshot was taken under a different ramp");
  }
  if (!(snapshot.voltage_fn.start == plan.voltage_fn.start) || !(snapshot.voltage_fn.end == plan.voltage_fn.end)) {
    throw DomainError("snapshot was taken along a different voltage function");
  }
  const double shared_until = std::min(snapshot.timing.t_hold_ns, timing.t_hold_ns);
  if (snapshot.time_ns > shared_until) {
    throw DomainError("snapshot at " + std::to_string(snapshot.time_ns) +
                      " ns lies past the end of the hold; the ramp-down histories differ");
  }
  Propagator prop(device, basis, plan.voltage_fn, plan.dt_ns, opts.cn);
  const double tg = plan.schedule.t_gate_ns();
  const long n = step_count(tg, plan.dt_ns);
  std::vector<long> snaps;
  for (double t : plan.snapshot_times_ns) snaps.push_back(std::min(n, std::lround(t / plan.dt_ns)));
  Trajectory traj;
  TwoBodyState state = snapshot.state;
  prop.run(state, timing, snapshot.step, n, tg, traj, snaps, opts);
  traj.final_state = std::move(state);
  return traj;
}

}  // namespace heligate
