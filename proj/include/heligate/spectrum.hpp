#pragma once

#include <array>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "heligate/davidson.hpp"
#include "heligate/dvr.hpp"

namespace heligate {

struct EigenSolution {
  std::vector<double> energies;  // ascending, dimensionless
  std::vector<TwoBodyState> states;
  std::vector<double> residuals;
  int iterations = 0;
};

/// Computational labels in eigen-index order: 00, 01, 10, 02, 11, 20.
inline constexpr std::array<std::pair<int, int>, 6> kExpectedLabels = {
    std::pair{0, 0}, std::pair{0, 1}, std::pair{1, 0}, std::pair{0, 2}, std::pair{1, 1}, std::pair{2, 0}};

/// Eigenstate indices of |00>, |01>, |10>, |11>.
inline constexpr std::array<int, 4> kQubitIndices = {0, 1, 2, 4};

struct QubitLabels {
  /// (left excitations, right excitations) for each eigen index.
  std::vector<std::pair<int, int>> excitations;
  bool matches_expected = false;
  bool ambiguous = false;
  std::vector<std::string> notes;

  /// Eigen index carrying the label, or -1.
  int index_of(int left, int right) const;
  std::string label(int index) const;
};

struct SpectrumOptions {
  int k = 6;
  double tol = 1e-8;
  int max_iterations = 500;
  /// One-body states per well used to seed the Davidson subspace.
  int seed_states_per_well = 6;
};

/// Lowest eigenpairs of the two-electron Hamiltonian currently held by the cache.
EigenSolution solve_spectrum(const OperatorCache& cache, const SpectrumOptions& opts = {});

/// Dense reference solution; only for small grids.
EigenSolution dense_spectrum(const OperatorCache& cache, int k);

/// E4 - E2 - E1 + E0.
double zz_coupling(std::span<const double> energies);

/// Labels each eigenstate by the node count of the dominant natural orbital
/// of its reduced left/right densities; near-degenerate pairs fall back to
/// overlaps with uncoupled product states.
QubitLabels label_states(const EigenSolution& sol, const OperatorCache& cache);

/// Spectrum of the device at one voltage setting on a fixed basis.
EigenSolution spectrum_at(const DeviceModel& device, const BasisPtr& basis, const VoltageVector& v,
                          const SpectrumOptions& opts = {});

/// Rows of `lambda,E0..E5,zeta` in GHz for a lambda sweep along a voltage function.
struct SpectrumRow {
  double lambda = 0.0;
  std::vector<double> energies_ghz;
  double zeta_ghz = 0.0;
};
std::vector<SpectrumRow> spectrum_sweep(const DeviceModel& device, const BasisPtr& basis,
                                        const VoltageFunction& f, std::span<const double> lambdas,
                                        const SpectrumOptions& opts = {});

}  // namespace heligate
