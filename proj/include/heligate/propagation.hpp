#pragma once

#include <limits>
#include <optional>
#include <span>
#include <vector>

#include "heligate/dvr.hpp"
#include "heligate/electrostatics.hpp"

namespace heligate {

struct CnOptions {
  double rel_tol = 1e-12;   // relative residual of each implicit solve
  int max_iterations = 300;  // Krylov iterations per solve
  int restart = 40;
  /// The eigenbasis of the separable part is rebuilt once |dt/2| times the
  /// potential drift (beyond a constant) since the last rebuild exceeds this.
  double rebuild_threshold = 0.05;
};

struct StepStats {
  int iterations = 0;
  double residual = 0.0;
};

/// Crank-Nicolson integrator (1 + i dt/2 H) psi' = (1 - i dt/2 H) psi.
///
/// The implicit system is solved by GMRES in the eigenbasis of the separable
/// part of H (kinetic + electrode potential + additive Coulomb fit), which is
/// diagonal there; only the Coulomb correlation remains for the iteration.
class CrankNicolson {
 public:
  explicit CrankNicolson(OperatorCache cache, CnOptions opts = {});

  /// Replaces the potential vectors. Energies are measured from `shift`,
  /// which should track the ground level so that dt*E stays small.
  void set_potentials(const Eigen::VectorXd& left, const Eigen::VectorXd& right, double shift);
  const OperatorCache& cache() const { return cache_; }
  long rebuilds() const { return rebuilds_; }

  /// Advances state by dt (dimensionless time; negative dt steps backwards,
  /// which is the adjoint of the forward step with the same Hamiltonian).
  StepStats step(Eigen::MatrixXcd& coeffs, double dt);

 private:
  void refresh();
  void update_split(double tau);
  void to_eigen(const Eigen::MatrixXcd& in, Eigen::MatrixXcd& out) const;
  void from_eigen(const Eigen::MatrixXcd& in, Eigen::MatrixXcd& out) const;
  void apply_shifted(const Eigen::MatrixXcd& y, Eigen::MatrixXcd& out, double tau);

  OperatorCache cache_;
  CnOptions opts_;
  bool have_basis_ = false;
  bool dirty_ = true;
  Eigen::MatrixXd q_left_, q_right_;  // one-body eigenvectors at the reference potentials
  Eigen::VectorXd eig_left_, eig_right_;
  Eigen::VectorXd ref_left_, ref_right_;
  Eigen::VectorXd coulomb_left_, coulomb_right_;  // additive fit of the Coulomb term
  Eigen::MatrixXd separable_;    // diagonal part in the eigenbasis
  Eigen::MatrixXd correlation_;  // remainder, diagonal in the grid basis
  double shift_ = 0.0;
  double last_tau_ = 0.0;
  long rebuilds_ = 0;
  Eigen::MatrixXcd denom_, rhs_, bhat_, y_, r_, v_, w_, work_, scaled_;
  mutable Eigen::MatrixXcd tmp_;
  Eigen::MatrixXcd krylov_;  // one column per Krylov vector
};

/// Rotating-frame energy: mean of the four qubit levels of the separable
/// (mean-field Coulomb) approximation to H.
double frame_energy(const OperatorCache& cache);

/// Single step with a freshly built integrator; the cache must already hold
/// the Hamiltonian at the step midpoint.
TwoBodyState crank_nicolson_step(const OperatorCache& cache, const TwoBodyState& state, double dt,
                                 const CnOptions& opts = {});

/// Electrode potentials along a voltage function, sampled on a fixed basis.
class LambdaPath {
 public:
  LambdaPath(const DeviceModel& device, BasisPtr basis, const VoltageFunction& f);

  std::pair<Eigen::VectorXd, Eigen::VectorXd> potentials(double lambda) const;
  const BasisPtr& basis() const { return basis_; }
  const VoltageFunction& voltage_fn() const { return fn_; }
  const DeviceModel& device() const { return device_; }

 private:
  DeviceModel device_;
  BasisPtr basis_;
  VoltageFunction fn_;
  Eigen::VectorXd left0_, left1_, right0_, right1_;
};

/// lambda(t) for a ramp/hold/ramp gate; an infinite hold gives the pure ramp-up
/// used as the donor trajectory of warm-started sweeps, and `ramp_down_only`
/// the closing 2 t_ramp of a long-hold gate.
struct GateTiming {
  double t_ramp_ns = 0.0;
  double t_hold_ns = 0.0;  // may be +inf
  double lambda_max = 1.0;
  bool ramp_down_only = false;

  bool open() const { return !std::isfinite(t_hold_ns); }
  double t_gate_ns() const { return t_hold_ns + 2.0 * t_ramp_ns; }
  double lambda(double t_ns) const;
  bool operator==(const GateTiming&) const = default;
};

struct PropagationPlan {
  RampSchedule schedule;
  VoltageFunction voltage_fn;
  double dt_ns = 0.001;
  std::vector<double> snapshot_times_ns;

  void validate() const;
  GateTiming timing() const { return {schedule.t_ramp_ns, schedule.t_hold_ns, voltage_fn.lambda_max}; }
};

/// State at an intermediate time together with the schedule that produced it.
struct Snapshot {
  double time_ns = 0.0;
  long step = 0;
  double dt_ns = 0.0;
  GateTiming timing;
  VoltageFunction voltage_fn;
  TwoBodyState state;
};

struct OverlapSeries {
  std::vector<double> times_ns;
  /// rows[t][n] = |<Psi(t)|Phi_n>|^2
  std::vector<std::vector<double>> rows;
};

struct Trajectory {
  TwoBodyState final_state;
  std::vector<Snapshot> snapshots;
  double norm_drift = 0.0;
  std::optional<OverlapSeries> overlaps;
  long steps = 0;
  long solver_iterations = 0;
  double max_residual = 0.0;
  double end_time_ns = 0.0;
};

struct PropagateOptions {
  CnOptions cn;
  /// Eigenbasis for overlap diagnostics; none recorded when empty.
  std::span<const TwoBodyState> overlap_basis;
  int overlap_every = 1;  // steps between overlap rows
};

/// Time grid shared by every trajectory with the same dt: t_k = k dt, with a
/// shortened last step so the grid ends exactly at t_gate.
long step_count(double t_end_ns, double dt_ns);

/// Drives states through lambda(t) on a fixed device/basis/voltage function.
class Propagator {
 public:
  Propagator(const DeviceModel& device, BasisPtr basis, const VoltageFunction& f, double dt_ns,
             CnOptions opts = {});

  const LambdaPath& path() const { return path_; }
  double dt_ns() const { return dt_ns_; }

  /// Steps `state` from grid step `from` to grid step `to` under `timing`,
  /// where the last grid step is shortened to end at `end_ns` when finite.
  /// Snapshots are taken at the requested step indices.
  void run(TwoBodyState& state, const GateTiming& timing, long from, long to, double end_ns,
           Trajectory& traj, std::span<const long> snapshot_steps, const PropagateOptions& opts);

  /// Steps several states in lockstep (same grid and lambda as run()).
  void advance(std::span<TwoBodyState> states, const GateTiming& timing, long from, long to, double end_ns,
               Trajectory& stats);

  /// Applies the adjoint of run(..., from, to, ...) to each state: states
  /// given at the end of the interval are mapped back to its start.
  void run_adjoint(std::span<TwoBodyState> states, const GateTiming& timing, long from, long to,
                   double end_ns, Trajectory& stats);

  /// One step of length dt_step (ns) with lambda evaluated at t_mid.
  StepStats step_at(Eigen::MatrixXcd& coeffs, double lambda, double dt_step_ns);
  long rebuilds() const { return cn_.rebuilds(); }

 private:
  LambdaPath path_;
  double dt_ns_;
  double shift0_ = 0.0, shift1_ = 0.0;
  CrankNicolson cn_;
  double current_lambda_ = std::numeric_limits<double>::quiet_NaN();
};

/// Full gate from t = 0 to t_gate.
Trajectory propagate(const DeviceModel& device, const BasisPtr& basis, const PropagationPlan& plan,
                     const TwoBodyState& initial, const PropagateOptions& opts = {});

/// Continues a stored snapshot under a (longer-hold) plan. Valid when the
/// snapshot's lambda history coincides with the plan's up to the snapshot
/// time, i.e. the snapshot lies no later than the end of either hold.
Trajectory resume_from(const DeviceModel& device, const BasisPtr& basis, const Snapshot& snapshot,
                       const PropagationPlan& plan, const PropagateOptions& opts = {});

}  // namespace heligate
