#pragma once

#include <complex>
#include <memory>
#include <span>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "heligate/electrostatics.hpp"

namespace heligate {

/// Uniform sinc-DVR grid in dimensionless length units.
struct DvrGrid {
  double start = 0.0;
  double spacing = 1.0;
  int count = 2;

  static DvrGrid make(double start, double spacing, int count);
  /// count points spanning [lo, hi] inclusive.
  static DvrGrid spanning(double lo, double hi, int count);

  double point(int i) const { return start + i * spacing; }
  double back() const { return point(count - 1); }
  Eigen::VectorXd points() const;
  void validate() const;
  bool operator==(const DvrGrid&) const = default;
};

/// Product basis of a left-well grid and a right-well grid.
struct TwoBodyBasis {
  DvrGrid left;
  DvrGrid right;

  void validate() const;
  int dim() const { return left.count * right.count; }
  bool operator==(const TwoBodyBasis&) const = default;
};

using BasisPtr = std::shared_ptr<const TwoBodyBasis>;
BasisPtr make_basis(DvrGrid left, DvrGrid right);

/// Two-electron wavefunction as a coefficient matrix C(alpha, beta) over (left, right) points.
class TwoBodyState {
 public:
  TwoBodyState() = default;
  TwoBodyState(BasisPtr basis, Eigen::MatrixXcd coeffs);
  static TwoBodyState zeros(BasisPtr basis);

  const Eigen::MatrixXcd& coeffs() const { return coeffs_; }
  Eigen::MatrixXcd& coeffs() { return coeffs_; }
  const TwoBodyBasis& basis() const { return *basis_; }
  const BasisPtr& basis_ptr() const { return basis_; }

  double norm() const { return coeffs_.norm(); }
  void normalize();
  bool same_basis(const TwoBodyState& other) const;

 private:
  BasisPtr basis_;
  Eigen::MatrixXcd coeffs_;
};

/// <a|b> = sum conj(A) B.
std::complex<double> inner(const TwoBodyState& a, const TwoBodyState& b);

/// Colbert-Miller sinc-DVR matrix of -1/2 d^2/dx^2.
Eigen::MatrixXd kinetic_matrix(const DvrGrid& grid);

/// Softened Coulomb repulsion kappa / sqrt(dx^2 + eps^2) on every (left, right) point pair.
Eigen::MatrixXd coulomb_diagonal(const TwoBodyBasis& basis, double kappa, double epsilon);

/// Electrode potential sampled on the left and right grids.
std::pair<Eigen::VectorXd, Eigen::VectorXd> potential_diagonals(const TwoBodyBasis& basis,
                                                                const CouplingProfile& profile,
                                                                const VoltageVector& v,
                                                                const UnitSystem& units);

/// Everything needed to apply H to a TwoBodyState. The kinetic and Coulomb
/// parts are shared between copies; the potential vectors belong to each copy.
class OperatorCache {
 public:
  OperatorCache(BasisPtr basis, double kappa, double epsilon);

  void set_potentials(Eigen::VectorXd left, Eigen::VectorXd right);

  const BasisPtr& basis_ptr() const { return fixed_->basis; }
  const TwoBodyBasis& basis() const { return *fixed_->basis; }
  double kappa() const { return fixed_->kappa; }
  double epsilon() const { return fixed_->epsilon; }
  const Eigen::MatrixXd& kinetic_left() const { return fixed_->kinetic_left; }
  const Eigen::MatrixXd& kinetic_right() const { return fixed_->kinetic_right; }
  const Eigen::MatrixXd& coulomb() const { return fixed_->coulomb; }
  const Eigen::VectorXd& potential_left() const { return potential_left_; }
  const Eigen::VectorXd& potential_right() const { return potential_right_; }

  /// Diagonal of H in the product basis (column-major over C).
  Eigen::MatrixXd diagonal() const;

  /// out = H c for a coefficient matrix c (real or complex). out must not alias c.
  template <typename In, typename Out>
  void apply(const Eigen::MatrixBase<In>& c, Eigen::MatrixBase<Out>& out) const {
    out.noalias() = fixed_->kinetic_left * c;
    out.noalias() += c * fixed_->kinetic_right;
    out += local_.cwiseProduct(c);
  }

  /// v_L(a) + v_R(b) + u(a, b): the part of H diagonal in the product basis.
  const Eigen::MatrixXd& local_terms() const { return local_; }

  /// Explicit D_L D_R square matrix; only for small grids and tests.
  Eigen::MatrixXd dense() const;

 private:
  struct Fixed {
    BasisPtr basis;
    double kappa;
    double epsilon;
    Eigen::MatrixXd kinetic_left;
    Eigen::MatrixXd kinetic_right;
    Eigen::MatrixXd coulomb;
  };
  std::shared_ptr<const Fixed> fixed_;
  Eigen::VectorXd potential_left_;
  Eigen::VectorXd potential_right_;
  Eigen::MatrixXd local_;
};

TwoBodyState apply_hamiltonian(const OperatorCache& cache, const TwoBodyState& state);

/// One-body Hamiltonian T + diag(v) on a single grid.
Eigen::MatrixXd one_body_hamiltonian(const DvrGrid& grid, const Eigen::VectorXd& potential);

/// Physical description of the device shared by all workflows.
struct DeviceModel {
  CouplingProfile profile = CouplingProfile::analytic(ElectrodeLayout::uniform());
  UnitSystem units = UnitSystem::from_coulomb_strength(2326.0);
  double kappa = 2326.0;
  double epsilon = 0.01;
};

/// Well geometry of the idle potential, all lengths dimensionless.
struct WellGeometry {
  double left_minimum = 0.0;
  double right_minimum = 0.0;
  double barrier = 0.0;
  double left_length = 0.0;   // harmonic length at the left minimum
  double right_length = 0.0;  // harmonic length at the right minimum
  double left_turning[2] = {0.0, 0.0};
  double right_turning[2] = {0.0, 0.0};
};

/// Locates the two deepest minima of the single-electron potential and the
/// barrier maximum between them.
WellGeometry locate_wells(const DeviceModel& device, const VoltageVector& idle);

struct GridOptions {
  int points_per_well = 32;
  /// Margin beyond the classical turning points of the second excited level.
  double margin_lengths = 4.0;
};

/// Left/right grids split at the idle barrier, each covering its well plus a margin.
BasisPtr auto_basis(const DeviceModel& device, const VoltageVector& idle, const GridOptions& opts = {});
/// Grids covering the wells of every configuration; split at the barrier of the first.
BasisPtr auto_basis(const DeviceModel& device, std::span<const VoltageVector> configs, const GridOptions& opts = {});

}  // namespace heligate
