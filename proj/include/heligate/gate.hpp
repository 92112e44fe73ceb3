#pragma once

#include <array>
#include <span>
#include <string>

#include <Eigen/Dense>

#include "heligate/dvr.hpp"

namespace heligate {

/// 4x4 qubit-subspace matrix in the order 00, 01, 10, 11.
using GateMatrix = Eigen::Matrix4cd;

enum class GateKind { sqrt_iswap, cz, identity };

GateKind parse_gate_kind(const std::string& name);
std::string to_string(GateKind kind);

/// Angles of G = e^{i phase} diag(1, e^{i theta_R}, e^{i theta_L}, e^{i(theta_L + theta_R)}) U.
struct RotationAngles {
  double theta_left = 0.0;
  double theta_right = 0.0;
  double global_phase = 0.0;
};

struct FidelityReport {
  double fidelity = 0.0;
  RotationAngles angles;
  double swap_error = 0.0;
  double leakage_error = 0.0;
  GateMatrix gate = GateMatrix::Identity();  // after the rotations
  bool flat_landscape = false;
};

GateMatrix target_gate(GateKind kind);

/// U_ij = <Phi_{n_i}|Psi_j(t_gate)> with n = (0, 1, 2, 4). `eigenstates` holds
/// either the four qubit states or the full low-lying set they are taken from.
GateMatrix overlap_gate_matrix(std::span<const TwoBodyState> eigenstates, std::span<const TwoBodyState> finals);

GateMatrix apply_z_rotations(const GateMatrix& u, const RotationAngles& a);

/// (Tr(M M^dag) + |Tr M|^2) / 20 with M = target^dag g.
double average_fidelity(const GateMatrix& g, const GateMatrix& target);

/// Maximizes the fidelity over theta_L, theta_R; the global phase is fixed
/// afterwards so that Tr M is real and positive.
FidelityReport optimize_rotations(const GateMatrix& u, const GateMatrix& target);

/// theta_L = arg U22 - arg U00, theta_R = arg U11 - arg U00, phase = -arg U00.
RotationAngles canonical_angles(const GateMatrix& u);

/// Gate with the canonical phases collected on G33: G00, G11, G22 real and
/// non-negative. The canonical angles enter with the opposite sign to
/// apply_z_rotations (the diagonal phases are removed, not added).
GateMatrix canonical_gate(const GateMatrix& u);

double swap_error(const GateMatrix& u);
double leakage_error(const GateMatrix& u);

struct ElementDiagnostic {
  double amplitude = 0.0;        // |G_ij|^2
  double ideal_amplitude = 0.0;  // |target_ij|^2
  double phase = 0.0;            // arg G_ij
  double phase_deviation = 0.0;  // arg G_ij - arg target_ij, in (-pi, pi]
};

using ElementReport = std::array<std::array<ElementDiagnostic, 4>, 4>;

/// Amplitude and phase of every element of the canonical gate against the target.
ElementReport elementwise_report(const GateMatrix& u, GateKind target);

/// Reduces an angle to (-pi, pi].
double wrap_angle(double a);

}  // namespace heligate
