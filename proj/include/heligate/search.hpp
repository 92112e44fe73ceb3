#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "heligate/gate.hpp"
#include "heligate/propagation.hpp"
#include "heligate/spectrum.hpp"

namespace heligate {

/// Device, basis and idle eigenstates shared by every cell of a sweep.
struct GateSystem {
  DeviceModel device;
  BasisPtr basis;
  EigenSolution idle;  // eigenstates at lambda = 0
  CnOptions cn;

  /// Solves the idle spectrum at `idle_voltages` on `basis`.
  static GateSystem build(const DeviceModel& device, BasisPtr basis, const VoltageVector& idle_voltages,
                          const SpectrumOptions& opts = {}, CnOptions cn = {});

  /// The four qubit states |00>, |01>, |10>, |11>.
  std::vector<TwoBodyState> qubit_states() const;
};

struct SweepSpec {
  std::vector<double> ramp_values;  // ns, ascending
  std::vector<double> hold_values;  // ns, ascending, uniform step, on the dt grid
  VoltageFunction voltage_fn;
  GateKind target = GateKind::sqrt_iswap;
  double dt_ns = 0.002;

  void validate() const;
};

struct CellResult {
  double t_ramp_ns = 0.0;
  double t_hold_ns = 0.0;
  bool ok = false;
  std::string error;  // set when !ok
  GateMatrix u = GateMatrix::Zero();
  FidelityReport report;
};

struct RowCost {
  long forward_steps = 0;   // shared ramp-up and hold
  long branch_steps = 0;    // per-hold ramp-downs
  long adjoint_steps = 0;   // shared ramp-down, run backwards
};

struct SweepResult {
  std::vector<double> ramp_values;
  std::vector<double> hold_values;
  /// cells[r * holds + h]
  std::vector<CellResult> cells;
  std::vector<RowCost> row_costs;
  std::optional<std::size_t> optimum;  // index into cells
  GateKind target = GateKind::sqrt_iswap;
  double dt_ns = 0.0;
  double wall_seconds = 0.0;

  const CellResult& cell(std::size_t r, std::size_t h) const { return cells.at(r * hold_values.size() + h); }
  long total_steps() const;
};

struct SearchOptions {
  int workers = 1;
  /// Share the final ramp-down between holds >= 2 t_ramp by propagating the
  /// idle eigenstates backwards; otherwise every hold gets its own ramp-down.
  bool shared_ramp_down = true;
  /// Called after each finished row (from worker threads, serialized).
  std::function<void(std::size_t row, const SweepResult&)> on_row;
};

/// Propagates the four qubit states through one gate from a cold start.
GateMatrix gate_matrix_cold(const GateSystem& sys, const VoltageFunction& f, double t_ramp_ns, double t_hold_ns,
                            double dt_ns, long* steps = nullptr);

/// Cold-start evaluation of a single (t_ramp, t_hold) cell.
CellResult evaluate_cell(const GateSystem& sys, const SweepSpec& spec, double t_ramp_ns, double t_hold_ns);

/// Grid search over (t_ramp, t_hold). Each ramp value is one row: the ramp-up
/// and hold are propagated once with snapshots at every hold value, and each
/// hold is finished from its snapshot.
SweepResult grid_search(const GateSystem& sys, const SweepSpec& spec, const SearchOptions& opts = {});

/// Steps a cold-start sweep of the same grid would take.
long cold_step_count(const SweepSpec& spec);

struct SensitivityResult {
  SweepResult map;
  std::vector<CellResult> ramp_section;  // t_hold fixed at the center
  std::vector<CellResult> hold_section;  // t_ramp fixed at the center
};

/// Dense map over center +- window at the given resolution, plus the two
/// axis-aligned cross-sections through the center.
SensitivityResult sensitivity_sweep(const GateSystem& sys, double center_ramp_ns, double center_hold_ns,
                                    double window_ns, double resolution_ns, const SweepSpec& base,
                                    const SearchOptions& opts = {});

/// Uniform ascending grid lo, lo + step, ... up to hi (inclusive within 1e-9).
std::vector<double> uniform_values(double lo, double hi, double step);

}  // namespace heligate
