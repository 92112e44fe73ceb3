#pragma once

#include <array>
#include <string>
#include <variant>
#include <vector>

namespace heligate {

inline constexpr int kElectrodeCount = 7;

/// Conversion factors between the dimensionless simulation units and lab units.
///
/// The kinetic operator is -1/2 d^2/dx^2, so a length unit L fixes the energy
/// unit at hbar^2/(m_e L^2). Times are measured in hbar/E_unit, which makes
/// 2*pi*energy_to_ghz*time_of_unit_ns == 1.
struct UnitSystem {
  double length_unit_um = 0.0;
  double energy_to_ghz = 0.0;
  double time_of_unit_ns = 0.0;

  /// Units in which u(x1,x2) = kappa/|x1-x2| is the bare electron Coulomb
  /// repulsion: L = kappa * a0, E = Hartree / kappa^2.
  static UnitSystem from_coulomb_strength(double kappa);
  /// Arbitrary length/energy pair; the time unit is derived.
  static UnitSystem make(double length_unit_um, double energy_to_ghz);

  void validate() const;

  /// Dimensionless energy of 1 meV.
  double millielectronvolt() const;
  double to_ghz(double energy) const { return energy * energy_to_ghz; }
  double from_ghz(double ghz) const { return ghz / energy_to_ghz; }
  double to_ns(double time) const { return time * time_of_unit_ns; }
  double from_ns(double ns) const { return ns / time_of_unit_ns; }
  double to_um(double length) const { return length * length_unit_um; }
  double from_um(double um) const { return um / length_unit_um; }
};

struct ElectrodeLayout {
  std::array<double, kElectrodeCount> centers_um{};
  std::array<double, kElectrodeCount> widths_um{};
  double depth_um = 0.0;

  /// 200 nm wide electrodes under 200 nm of helium, uniform pitch centered on 0.
  static ElectrodeLayout uniform(double pitch_um = 0.4, double width_um = 0.2, double depth_um = 0.2);
  void validate() const;
};

/// Dimensionless electrode coupling functions alpha_k(x) at the helium surface.
class CouplingProfile {
 public:
  struct Tabulated {
    std::vector<double> x_um;
    std::array<std::vector<double>, kElectrodeCount> alpha;
    // Hermite slopes for monotone piecewise-cubic interpolation.
    std::array<std::vector<double>, kElectrodeCount> slope;
  };

  static CouplingProfile analytic(const ElectrodeLayout& layout);
  static CouplingProfile tabulated(std::vector<double> x_um,
                                   std::array<std::vector<double>, kElectrodeCount> alpha);
  /// CSV with header `x,alpha1,...,alpha7`, x in um ascending.
  static CouplingProfile load_csv(const std::string& path);
  void save_csv(const std::string& path, const std::vector<double>& x_um) const;

  bool is_analytic() const { return std::holds_alternative<ElectrodeLayout>(data_); }
  const ElectrodeLayout* layout() const { return std::get_if<ElectrodeLayout>(&data_); }
  const Tabulated* table() const { return std::get_if<Tabulated>(&data_); }

  /// Closed interval on which alpha may be evaluated (infinite for analytic).
  double domain_min_um() const;
  double domain_max_um() const;
  bool contains(double x_um) const;

  double alpha(int electrode, double x_um) const;

 private:
  using Data = std::variant<ElectrodeLayout, Tabulated>;
  explicit CouplingProfile(Data d) : data_(std::move(d)) {}
  Data data_;
};

struct VoltageVector {
  std::array<double, kElectrodeCount> mv{};

  void validate() const;
  bool operator==(const VoltageVector&) const = default;
};

enum class VoltageFamily { beta, zeta };
enum class TargetConfig { II, III };

/// Linear path V(lambda) = (1-lambda) start + lambda end between two configurations.
struct VoltageFunction {
  VoltageVector start;
  VoltageVector end;
  double lambda_max = 1.0;
  VoltageFamily family = VoltageFamily::zeta;
  TargetConfig target = TargetConfig::II;

  /// lambda_max follows from the family: beta->II uses 0.46, everything else 1.
  static VoltageFunction make(VoltageVector start, VoltageVector end, VoltageFamily family,
                              TargetConfig target);
  void validate() const;
};

inline constexpr double kBetaSwapLambda = 0.46;

struct RampSchedule {
  double t_ramp_ns = 0.0;
  double t_hold_ns = 0.0;

  RampSchedule() = default;
  RampSchedule(double ramp_ns, double hold_ns);

  /// Width of the erf edges; t_ramp = 4*sqrt(2)*sigma.
  double sigma_ns() const;
  double t_gate_ns() const { return t_hold_ns + 2.0 * t_ramp_ns; }
  void validate() const;
};

/// alpha_k(x) for electrode index k in [0, 7).
double alpha_eval(const CouplingProfile& profile, int electrode, double x_um);

/// Electron potential energy -sum_k alpha_k(x) V_k, in dimensionless energy units.
double surface_potential(const CouplingProfile& profile, const VoltageVector& v, double x_um,
                         const UnitSystem& units);

VoltageVector voltage_at(const VoltageFunction& f, double lambda);

/// Double-erf ramp: lambda_max/2 [erf((t - t_ramp/2)/(sqrt2 sigma)) - erf((t - t_gate + t_ramp/2)/(sqrt2 sigma))].
double lambda_at(const RampSchedule& s, double lambda_max, double t_ns);

/// The same ramp with an unbounded hold (second erf pinned to -1). Agrees with
/// lambda_at to the last bit for every t <= t_hold.
double lambda_ramp_up(double t_ramp_ns, double lambda_max, double t_ns);

/// The final 2 t_ramp of any gate whose hold is at least 2 t_ramp, with t_ns
/// measured from the end of the hold (first erf pinned to 1).
double lambda_ramp_down(double t_ramp_ns, double lambda_max, double t_ns);

}  // namespace heligate
