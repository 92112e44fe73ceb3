#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "heligate/dvr.hpp"
#include "heligate/spectrum.hpp"

namespace heligate {

enum class LossConfig { zeta_only, I, II, III };

LossConfig parse_loss_config(const std::string& name);
std::string to_string(LossConfig c);

/// max(0, threshold - gap)^2
double hinge(double gap, double threshold);

struct LossSpec {
  LossConfig config = LossConfig::I;
  /// Weights of the terms after the zeta term, in order (see loss_terms()).
  std::vector<double> weights;
  double band_low_ghz = 5.0;
  double band_high_ghz = 15.0;
  double min_detuning_ghz = 3.0;
  double min_gap_ghz = 1.5;

  /// Default weights: I (1e-2, 1e-2), II (1e-4, 1e-2, 1e-2), III (1, 1, 1, 1e4).
  static LossSpec defaults(LossConfig config);
  void validate() const;
};

struct LossTerm {
  std::string name;
  double weight = 1.0;
  double raw = 0.0;
  double value = 0.0;  // weight * raw
};

struct LossBreakdown {
  double total = 0.0;
  std::vector<LossTerm> terms;
  std::vector<double> energies_ghz;
  double zeta_ghz = 0.0;
};

/// Loss from the six lowest energies in GHz (ascending).
LossBreakdown loss_from_energies(const LossSpec& spec, std::span<const double> energies_ghz);

/// Six lowest energies (GHz) at a voltage vector.
using SpectrumEvaluator = std::function<std::vector<double>(const VoltageVector&)>;

/// Evaluator on the device, rebuilding the grid around the wells of each candidate.
SpectrumEvaluator device_evaluator(const DeviceModel& device, const GridOptions& grid = {},
                                   const SpectrumOptions& opts = {});

/// Rejects (DomainError) candidates whose well minima move more than
/// `max_shift_um` from those of `reference`; otherwise defers to `inner`.
SpectrumEvaluator pinned_wells(SpectrumEvaluator inner, const DeviceModel& device, const VoltageVector& reference,
                               double max_shift_um);

LossBreakdown loss_value(const LossSpec& spec, const SpectrumEvaluator& eval, const VoltageVector& v);

struct OptimizerOptions {
  double box_mv = 50.0;                        // half-width of the search box around the initial vector
  std::vector<double> steps_mv = {5.0, 1.0, 0.2};  // initial simplex size of successive restarts
  std::uint64_t seed = 0;                      // orientation of the restart simplices
};

struct TraceEntry {
  VoltageVector v;
  double loss = 0.0;
  int evaluation = 0;
};

struct OptimizationTrace {
  std::vector<TraceEntry> iterates;  // accepted (improving) points
  VoltageVector best;
  LossBreakdown best_breakdown;
  int evaluations = 0;
  int failed_evaluations = 0;
  bool budget_exhausted = false;
};

/// Derivative-free minimization of the loss inside the box; returns the best
/// point found. A zero budget returns the initial vector.
OptimizationTrace optimize_voltages(const VoltageVector& initial, const LossSpec& spec, int budget,
                                    const SpectrumEvaluator& eval, const OptimizerOptions& opts = {});

}  // namespace heligate
