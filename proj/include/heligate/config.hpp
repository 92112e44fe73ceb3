#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "heligate/dvr.hpp"
#include "heligate/gate.hpp"
#include "heligate/propagation.hpp"
#include "heligate/spectrum.hpp"
#include "heligate/voltage_opt.hpp"

namespace heligate {

inline constexpr int kSchemaVersion = 1;

/// Built-in reference voltage vectors (mV) keyed "I", "II", "III".
const std::map<std::string, VoltageVector>& builtin_voltages();

struct ProfileConfig {
  std::string kind = "analytic";  // analytic | tabulated
  double pitch_um = 0.4;
  double width_um = 0.2;
  double depth_um = 0.2;
  std::optional<std::array<double, kElectrodeCount>> centers_um;
  std::optional<std::array<double, kElectrodeCount>> widths_um;
  std::string path;  // tabulated only, resolved against the config directory
};

struct DeviceConfig {
  double kappa = 2326.0;
  double epsilon = 0.01;
  std::optional<double> length_unit_um;  // both or neither; default: Coulomb units of kappa
  std::optional<double> energy_to_ghz;
  ProfileConfig profile;
};

struct VoltageFunctionConfig {
  std::string start = "I";
  std::string end = "II";
  VoltageFamily family = VoltageFamily::zeta;
  TargetConfig target = TargetConfig::II;
  std::optional<double> lambda_max;
};

struct NumericsConfig {
  int points_per_well = 32;
  double margin_lengths = 4.0;
  double dt_ns = 0.002;
  CnOptions cn;
  SpectrumOptions spectrum;
};

struct SpectrumConfig {
  std::optional<std::string> idle;  // voltage name for the grid; default: voltage_function.start
  std::vector<double> lambdas = {0.0};
  bool kappa_zero = false;
};

struct PropagateConfig {
  double t_ramp_ns = 0.5;
  double t_hold_ns = 1.0;
  GateKind target = GateKind::sqrt_iswap;
  std::vector<double> snapshots_ns;
  int overlap_states = 6;
  int overlap_every = 1;
};

struct SearchConfig {
  GateKind target = GateKind::sqrt_iswap;
  std::vector<double> ramps_ns;
  std::vector<double> holds_ns;
  bool shared_ramp_down = true;
};

struct SensitivityConfig {
  GateKind target = GateKind::sqrt_iswap;
  std::optional<double> center_ramp_ns;
  std::optional<double> center_hold_ns;
  double window_ns = 0.1;
  double resolution_ns = 0.01;
};

struct VoltOptConfig {
  LossConfig config = LossConfig::I;
  std::string initial = "I";
  int budget = 2000;
  std::optional<std::vector<double>> weights;
  double band_low_ghz = 5.0;
  double band_high_ghz = 15.0;
  double min_detuning_ghz = 3.0;
  double min_gap_ghz = 1.5;
  double box_mv = 50.0;
  std::vector<double> steps_mv = {5.0, 1.0, 0.2};
  std::uint64_t seed = 0;
  std::optional<double> max_well_shift_um;
};

struct AnalyzeConfig {
  std::string gate;        // gate JSON path
  std::string trajectory;  // optional trajectory JSON path
  GateKind target = GateKind::sqrt_iswap;
};

/// Input file referenced by a config, with its digest at load time.
struct InputFile {
  std::string role;
  std::string path;
  std::string sha256;
};

struct RunConfig {
  DeviceConfig device;
  std::map<std::string, VoltageVector> voltages;  // builtins plus user entries
  VoltageFunctionConfig voltage_function;
  NumericsConfig numerics;
  SpectrumConfig spectrum;
  PropagateConfig propagate;
  SearchConfig search;
  SensitivityConfig sensitivity;
  VoltOptConfig volt_opt;
  AnalyzeConfig analyze;
  std::vector<InputFile> inputs;

  /// Parses and validates; relative paths resolve against `base_dir`.
  /// Unknown keys anywhere are rejected with their location.
  static RunConfig from_json(const nlohmann::json& j, const std::filesystem::path& base_dir = {});
  static RunConfig load(const std::filesystem::path& path);

  /// Fully expanded form (defaults filled in, voltages resolved, input digests).
  nlohmann::json to_json() const;
  /// SHA-256 of the canonical dump of to_json().
  std::string hash() const;

  DeviceModel device_model() const;
  const VoltageVector& voltage(const std::string& name) const;
  VoltageFunction voltage_function_value() const;
  GridOptions grid_options() const;
  LossSpec loss_spec() const;
  OptimizerOptions optimizer_options() const;
};

/// Expands {"from": a, "to": b, "step": s} or passes a plain list through.
std::vector<double> parse_value_list(const nlohmann::json& j, const std::string& where);

}  // namespace heligate
