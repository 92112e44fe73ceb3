#include "heligate/io.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <random>
#include <sstream>

#include <openssl/evp.h>

#include "heligate/error.hpp"

namespace heligate {

namespace fs = std::filesystem;

std::string format_number(double x) {
  if (!std::isfinite(x)) return std::isnan(x) ? "nan" : (x > 0 ? "inf" : "-inf");
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.2f", x);
  if (std::strtod(buf, nullptr) == x) return buf;
  auto r = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, r.ptr);
}

std::string sha256_hex(const std::string& bytes) {
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), md, &len, EVP_sha256(), nullptr) != 1) {
    throw Error("sha256 digest failed");
  }
  static const char* hex = "0123456789abcdef";
  std::string out;
  for (unsigned int i = 0; i < len; ++i) {
    out += hex[md[i] >> 4];
    out += hex[md[i] & 15];
  }
  return out;
}

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string sha256_file(const fs::path& path) { return sha256_hex(read_file(path)); }

void write_file_atomic(const fs::path& path, const std::string& content) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::random_device rd;
  fs::path tmp = path;
  tmp += ".tmp" + std::to_string(rd());
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw ConfigError("cannot write " + tmp.string());
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    out.flush();
    if (!out) {
      std::error_code ec;
      fs::remove(tmp, ec);
      throw ConfigError("write failed for " + path.string());
    }
  }
  std::error_code ec;
  fs::rename(tmp, path, ec);
  if (ec) {
    fs::remove(tmp, ec);
    throw ConfigError("cannot move output into place: " + path.string());
  }
}

namespace {

std::string trim(std::string s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

double parse_double(const std::string& tok, const std::string& where) {
  const std::string t = trim(tok);
  double v = 0.0;
  const auto r = std::from_chars(t.data(), t.data() + t.size(), v);
  if (t.empty() || r.ec != std::errc() || r.ptr != t.data() + t.size()) {
    throw ConfigError(where + ": not a number: '" + t + "'");
  }
  return v;
}

}  // namespace

VoltageVector parse_voltage_csv(const std::string& text, const std::string& origin) {
  std::istringstream in(text);
  std::string line;
  VoltageVector v;
  std::array<bool, kElectrodeCount> seen{};
  int lineno = 0;
  bool header = false;
  while (std::getline(in, line)) {
    ++lineno;
    line = trim(line);
    if (line.empty() || line[0] == '#') continue;
    const auto comma = line.find(',');
    const std::string where = origin + ":" + std::to_string(lineno);
    if (comma == std::string::npos) throw ConfigError(where + ": expected 'electrode,mV'");
    const std::string a = trim(line.substr(0, comma));
    const std::string b = trim(line.substr(comma + 1));
    if (!header) {
      header = true;
      if (a == "electrode") continue;
    }
    const double idx = parse_double(a, where);
    const int k = static_cast<int>(idx);
    if (idx != k || k < 1 || k > kElectrodeCount) throw ConfigError(where + ": electrode must be 1..7");
    if (seen[k - 1]) throw ConfigError(where + ": electrode " + std::to_string(k) + " listed twice");
    seen[k - 1] = true;
    v.mv[k - 1] = parse_double(b, where);
  }
  for (int k = 0; k < kElectrodeCount; ++k) {
    if (!seen[k]) throw ConfigError(origin + ": missing electrode " + std::to_string(k + 1));
  }
  v.validate();
  return v;
}

VoltageVector load_voltage_csv(const fs::path& path) { return parse_voltage_csv(read_file(path), path.string()); }

std::string voltage_csv(const VoltageVector& v) {
  std::string out = "electrode,mV\n";
  for (int k = 0; k < kElectrodeCount; ++k) out += std::to_string(k + 1) + "," + format_number(v.mv[k]) + "\n";
  return out;
}

namespace {

std::string num(double x) {
  char buf[64];
  auto r = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, r.ptr);
}

}  // namespace

std::string spectrum_csv(const std::vector<SpectrumRow>& rows) {
  std::string out = "lambda,E0,E1,E2,E3,E4,E5,zeta\n";
  for (const auto& r : rows) {
    out += num(r.lambda);
    for (std::size_t k = 0; k < 6; ++k) out += "," + (k < r.energies_ghz.size() ? num(r.energies_ghz[k]) : "nan");
    out += "," + num(r.zeta_ghz) + "\n";
  }
  return out;
}

std::string sweep_csv(std::span<const CellResult> cells) {
  std::string out = "t_ramp_ns,t_hold_ns,fidelity,swap_error,leak_error,theta_L,theta_R\n";
  for (const auto& c : cells) {
    out += num(c.t_ramp_ns) + "," + num(c.t_hold_ns);
    if (c.ok) {
      const auto& r = c.report;
      out += "," + num(r.fidelity) + "," + num(r.swap_error) + "," + num(r.leakage_error) + "," +
             num(r.angles.theta_left) + "," + num(r.angles.theta_right);
    } else {
      out += ",error,error,error,error,error";
    }
    out += "\n";
  }
  return out;
}

std::string sweep_errors_csv(std::span<const CellResult> cells) {
  std::string out = "t_ramp_ns,t_hold_ns,message\n";
  for (const auto& c : cells) {
    if (c.ok) continue;
    std::string msg = c.error;
    for (char& ch : msg)
      if (ch == '\n' || ch == '\r') ch = ' ';
    std::string quoted = "\"";
    for (char ch : msg) {
      if (ch == '"') quoted += '"';
      quoted += ch;
    }
    quoted += '"';
    out += num(c.t_ramp_ns) + "," + num(c.t_hold_ns) + "," + quoted + "\n";
  }
  return out;
}

std::string overlap_csv(const OverlapSeries& series, int propagated_index) {
  std::size_t n = series.rows.empty() ? 0 : series.rows.front().size();
  std::string out = "t";
  for (std::size_t k = 0; k < n; ++k) {
    out += ",|<Psi_" + std::to_string(k) + "|Phi_" + std::to_string(propagated_index) + ">|^2";
  }
  out += "\n";
  for (std::size_t i = 0; i < series.times_ns.size(); ++i) {
    out += num(series.times_ns[i]);
    for (double x : series.rows[i]) out += "," + num(x);
    out += "\n";
  }
  return out;
}

json gate_to_json(const GateMatrix& g) {
  json re_im = json::array(), polar = json::array();
  for (int i = 0; i < 4; ++i) {
    json a = json::array(), b = json::array();
    for (int j = 0; j < 4; ++j) {
      a.push_back({g(i, j).real(), g(i, j).imag()});
      b.push_back({std::abs(g(i, j)), std::arg(g(i, j)) / std::numbers::pi});
    }
    re_im.push_back(a);
    polar.push_back(b);
  }
  return {{"re_im", re_im}, {"polar", polar}};
}

GateMatrix gate_from_json(const json& j) {
  const json* m = &j;
  if (j.is_object()) {
    if (j.contains("u")) return gate_from_json(j.at("u"));
    if (!j.contains("re_im")) throw ConfigError("gate JSON needs a 're_im' matrix");
    m = &j.at("re_im");
  }
  if (!m->is_array() || m->size() != 4) throw ConfigError("gate matrix must be 4x4");
  GateMatrix g;
  for (int i = 0; i < 4; ++i) {
    const json& row = (*m)[i];
    if (!row.is_array() || row.size() != 4) throw ConfigError("gate matrix must be 4x4");
    for (int k = 0; k < 4; ++k) {
      const json& e = row[k];
      if (!e.is_array() || e.size() != 2 || !e[0].is_number() || !e[1].is_number()) {
        throw ConfigError("gate entries must be [re, im] pairs");
      }
      g(i, k) = {e[0].get<double>(), e[1].get<double>()};
    }
  }
  return g;
}

json report_to_json(const FidelityReport& r) {
  return {{"fidelity", r.fidelity},
          {"theta_L", r.angles.theta_left},
          {"theta_R", r.angles.theta_right},
          {"global_phase", r.angles.global_phase},
          {"swap_error", r.swap_error},
          {"leak_error", r.leakage_error},
          {"flat_landscape", r.flat_landscape},
          {"gate", gate_to_json(r.gate)}};
}

json breakdown_to_json(const LossBreakdown& b) {
  json terms = json::array();
  for (const auto& t : b.terms) terms.push_back({{"name", t.name}, {"weight", t.weight}, {"raw", t.raw}, {"value", t.value}});
  return {{"total", b.total}, {"zeta_ghz", b.zeta_ghz}, {"energies_ghz", b.energies_ghz}, {"terms", terms}};
}

json trace_to_json(const OptimizationTrace& t) {
  json it = json::array();
  for (const auto& e : t.iterates) it.push_back({{"evaluation", e.evaluation}, {"loss", e.loss}, {"mv", e.v.mv}});
  return {{"iterates", it},
          {"best_mv", t.best.mv},
          {"best", breakdown_to_json(t.best_breakdown)},
          {"evaluations", t.evaluations},
          {"failed_evaluations", t.failed_evaluations},
          {"budget_exhausted", t.budget_exhausted}};
}

std::string elementwise_csv(const ElementReport& rep) {
  std::string out = "row,col,amplitude,ideal_amplitude,phase_over_pi,phase_deviation_over_pi\n";
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) {
      const auto& d = rep[i][j];
      out += std::to_string(i) + "," + std::to_string(j) + "," + num(d.amplitude) + "," + num(d.ideal_amplitude) +
             "," + num(d.phase / std::numbers::pi) + "," + num(d.phase_deviation / std::numbers::pi) + "\n";
    }
  return out;
}

namespace {

json digest_json(const FileDigest& d) { return {{"path", d.path}, {"sha256", d.sha256}, {"bytes", d.bytes}}; }

FileDigest digest_from(const json& j) {
  FileDigest d;
  d.path = j.at("path").get<std::string>();
  d.sha256 = j.at("sha256").get<std::string>();
  d.bytes = j.at("bytes").get<std::uintmax_t>();
  return d;
}

}  // namespace

json RunManifest::to_json() const {
  json in = json::array(), out = json::array();
  for (const auto& d : inputs) in.push_back(digest_json(d));
  for (const auto& d : outputs) out.push_back(digest_json(d));
  return {{"tool", tool},       {"version", version}, {"command", command},          {"config_hash", config_hash},
          {"config", config},   {"inputs", in},       {"outputs", out},              {"wall_seconds", wall_seconds},
          {"solver", solver},   {"warnings", warnings}};
}

RunManifest RunManifest::from_json(const json& j) {
  try {
    RunManifest m;
    m.tool = j.at("tool").get<std::string>();
    m.version = j.at("version").get<std::string>();
    m.command = j.at("command").get<std::string>();
    m.config_hash = j.at("config_hash").get<std::string>();
    m.config = j.at("config");
    for (const auto& d : j.at("inputs")) m.inputs.push_back(digest_from(d));
    for (const auto& d : j.at("outputs")) m.outputs.push_back(digest_from(d));
    m.wall_seconds = j.at("wall_seconds").get<double>();
    m.solver = j.at("solver");
    m.warnings = j.at("warnings").get<std::vector<std::string>>();
    return m;
  } catch (const json::exception& e) {
    throw ConfigError(std::string("malformed manifest: ") + e.what());
  }
}

std::vector<std::string> RunManifest::verify(const fs::path& out_dir) const {
  std::vector<std::string> bad;
  for (const auto& d : outputs) {
    const fs::path p = out_dir / d.path;
    std::error_code ec;
    if (!fs::exists(p, ec) || fs::file_size(p, ec) != d.bytes || sha256_file(p) != d.sha256) bad.push_back(d.path);
  }
  return bad;
}

}  // namespace heligate
