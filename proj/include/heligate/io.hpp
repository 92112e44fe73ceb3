#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "heligate/electrostatics.hpp"
#include "heligate/gate.hpp"
#include "heligate/propagation.hpp"
#include "heligate/search.hpp"
#include "heligate/spectrum.hpp"
#include "heligate/voltage_opt.hpp"

namespace heligate {

using json = nlohmann::json;

/// Shortest decimal text that parses back to exactly `x`; values that survive
/// two fixed decimals are written that way (built-in vector layout).
std::string format_number(double x);

/// Hex SHA-256 of a byte string / file.
std::string sha256_hex(const std::string& bytes);
std::string sha256_file(const std::filesystem::path& path);

std::string read_file(const std::filesystem::path& path);

/// Writes through a temporary file in the same directory and renames it into place.
void write_file_atomic(const std::filesystem::path& path, const std::string& content);

/// CSV `electrode,mV`, electrodes numbered 1..7.
VoltageVector parse_voltage_csv(const std::string& text, const std::string& origin = "<input>");
VoltageVector load_voltage_csv(const std::filesystem::path& path);
std::string voltage_csv(const VoltageVector& v);

/// `lambda,E0_GHz,...,E5_GHz,zeta_GHz`
std::string spectrum_csv(const std::vector<SpectrumRow>& rows);

/// `t_ramp_ns,t_hold_ns,fidelity,swap_error,leak_error,theta_L,theta_R`;
/// failed cells carry `error` in every result column.
std::string sweep_csv(std::span<const CellResult> cells);
/// `t_ramp_ns,t_hold_ns,message` for failed cells.
std::string sweep_errors_csv(std::span<const CellResult> cells);

/// `t,|<Psi_n|Phi_0>|^2,...` for one propagated state.
std::string overlap_csv(const OverlapSeries& series, int propagated_index);

/// Gate matrix as {"re_im": [[[re, im], ...]], "polar": [[[modulus, phase/pi], ...]]}.
json gate_to_json(const GateMatrix& g);
GateMatrix gate_from_json(const json& j);

json report_to_json(const FidelityReport& r);
json trace_to_json(const OptimizationTrace& t);
json breakdown_to_json(const LossBreakdown& b);

struct FileDigest {
  std::string path;  // relative to the output directory for outputs
  std::string sha256;
  std::uintmax_t bytes = 0;
};

struct RunManifest {
  std::string tool = "heligate";
  std::string version;
  std::string command;
  std::string config_hash;
  json config;
  std::vector<FileDigest> inputs;
  std::vector<FileDigest> outputs;
  double wall_seconds = 0.0;
  json solver = json::object();
  std::vector<std::string> warnings;

  json to_json() const;
  static RunManifest from_json(const json& j);
  /// Output files whose current digest or size differs from the record.
  std::vector<std::string> verify(const std::filesystem::path& out_dir) const;
};

/// `row,col,amplitude,ideal_amplitude,phase_over_pi,phase_deviation_over_pi`
std::string elementwise_csv(const ElementReport& rep);

}  // namespace heligate
