#include "heligate/config.hpp"

#include <cmath>
#include <set>

#include "heligate/error.hpp"
#include "heligate/io.hpp"
#include "heligate/search.hpp"

namespace heligate {

namespace fs = std::filesystem;

const std::map<std::string, VoltageVector>& builtin_voltages() {
  static const std::map<std::string, VoltageVector> table = {
      {"I", {{389.50, 200.70, 400.36, -290.61, 398.59, 200.15, 381.40}}},
      {"II", {{388.68, 206.69, 404.88, -288.37, 401.04, 192.98, 382.57}}},
      {"III", {{388.17, 194.01, 401.87, -289.10, 398.95, 198.82, 382.44}}},
  };
  return table;
}

namespace {

// Object reader that remembers which keys were consumed.
class Section {
 public:
  Section(const json& j, std::string where) : j_(j), where_(std::move(where)) {
    if (!j_.is_object()) throw ConfigError(where_ + ": expected an object");
  }
  ~Section() noexcept(false) {
    if (std::uncaught_exceptions() > 0) return;
    for (const auto& [k, v] : j_.items()) {
      if (!used_.count(k)) throw ConfigError(where_ + "." + k + ": unknown key");
    }
  }

  bool has(const std::string& k) {
    used_.insert(k);
    return j_.contains(k) && !j_.at(k).is_null();
  }
  const json& at(const std::string& k) {
    used_.insert(k);
    return j_.at(k);
  }
  std::string path(const std::string& k) const { return where_ + "." + k; }

  double number(const std::string& k, double def) {
    if (!has(k)) return def;
    const json& v = j_.at(k);
    if (!v.is_number()) throw ConfigError(path(k) + ": expected a number");
    const double x = v.get<double>();
    if (!std::isfinite(x)) throw ConfigError(path(k) + ": must be finite");
    return x;
  }
  std::optional<double> opt_number(const std::string& k) {
    if (!has(k)) return std::nullopt;
    return number(k, 0.0);
  }
  long long integer(const std::string& k, long long def) {
    if (!has(k)) return def;
    const json& v = j_.at(k);
    if (!v.is_number_integer()) throw ConfigError(path(k) + ": expected an integer");
    return v.get<long long>();
  }
  std::uint64_t unsigned_integer(const std::string& k, std::uint64_t def) {
    if (!has(k)) return def;
    const json& v = j_.at(k);
    if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<long long>() >= 0)) {
      throw ConfigError(path(k) + ": expected a non-negative integer");
    }
    return v.get<std::uint64_t>();
  }
  bool boolean(const std::string& k, bool def) {
    if (!has(k)) return def;
    const json& v = j_.at(k);
    if (!v.is_boolean()) throw ConfigError(path(k) + ": expected true or false");
    return v.get<bool>();
  }
  std::string string(const std::string& k, std::string def) {
    if (!has(k)) return def;
    const json& v = j_.at(k);
    if (!v.is_string()) throw ConfigError(path(k) + ": expected a string");
    return v.get<std::string>();
  }
  std::vector<double> numbers(const std::string& k) {
    const json& v = at(k);
    if (!v.is_array()) throw ConfigError(path(k) + ": expected a list of numbers");
    std::vector<double> out;
    for (std::size_t i = 0; i < v.size(); ++i) {
      if (!v[i].is_number()) throw ConfigError(path(k) + "[" + std::to_string(i) + "]: expected a number");
      out.push_back(v[i].get<double>());
    }
    return out;
  }
  std::array<double, kElectrodeCount> seven(const std::string& k) {
    const auto v = numbers(k);
    if (v.size() != kElectrodeCount) throw ConfigError(path(k) + ": expected 7 values");
    std::array<double, kElectrodeCount> a{};
    std::copy(v.begin(), v.end(), a.begin());
    return a;
  }

 private:
  const json& j_;
  std::string where_;
  std::set<std::string> used_;
};

const json& empty_object() {
  static const json e = json::object();
  return e;
}

const json& section_json(const json& root, const char* key, std::set<std::string>& used) {
  used.insert(key);
  if (!root.contains(key) || root.at(key).is_null()) return empty_object();
  return root.at(key);
}

template <class F>
auto rethrow_as_config(const std::string& where, F&& f) {
  try {
    return f();
  } catch (const ConfigError&) {
    throw;
  } catch (const Error& e) {
    throw ConfigError(where + ": " + e.what());
  }
}

GateKind gate_kind(Section& s, const std::string& k, GateKind def) {
  if (!s.has(k)) return def;
  const std::string name = s.string(k, "");
  return rethrow_as_config(s.path(k), [&] { return parse_gate_kind(name); });
}

std::string resolve(const fs::path& base, const std::string& p) {
  if (p.empty()) return p;
  fs::path path(p);
  if (path.is_relative() && !base.empty()) path = base / path;
  return path.lexically_normal().string();
}

std::vector<double> sweep_default_ramps(GateKind target) {
  const double unit = 4.0 * std::sqrt(2.0);
  const double hi = target == GateKind::cz ? 0.7 : 0.5;
  std::vector<double> v;
  for (int k = 5; k <= static_cast<int>(std::lround(hi * 100)); ++k) v.push_back(k * 0.01 * unit);
  return v;
}

std::vector<double> sweep_default_holds(GateKind target) {
  const int n = target == GateKind::cz ? 100 : 50;
  std::vector<double> v;
  for (int k = 0; k <= n; ++k) v.push_back(k * 0.1);
  return v;
}

std::string family_name(VoltageFamily f) { return f == VoltageFamily::beta ? "beta" : "zeta"; }
std::string target_name(TargetConfig t) { return t == TargetConfig::II ? "II" : "III"; }

}  // namespace

std::vector<double> parse_value_list(const json& j, const std::string& where) {
  if (j.is_array()) {
    std::vector<double> v;
    for (std::size_t i = 0; i < j.size(); ++i) {
      if (!j[i].is_number()) throw ConfigError(where + "[" + std::to_string(i) + "]: expected a number");
      v.push_back(j[i].get<double>());
    }
    return v;
  }
  if (j.is_object()) {
    Section s(j, where);
    if (!s.has("from") || !s.has("to") || !s.has("step")) {
      throw ConfigError(where + ": range needs 'from', 'to' and 'step'");
    }
    const double lo = s.number("from", 0), hi = s.number("to", 0), step = s.number("step", 0);
    if (!(step > 0.0)) throw ConfigError(where + ".step: must be positive");
    if (hi < lo) throw ConfigError(where + ": 'to' below 'from'");
    return uniform_values(lo, hi, step);
  }
  throw ConfigError(where + ": expected a list or a {from, to, step} range");
}

RunConfig RunConfig::from_json(const json& root, const fs::path& base_dir) {
  if (!root.is_object()) throw ConfigError("config: expected a JSON object");
  std::set<std::string> top;
  RunConfig c;

  top.insert("schema_version");
  top.insert("input_digests");  // written by to_json(); recomputed on load
  if (!root.contains("schema_version")) throw ConfigError("config.schema_version: missing");
  if (!root.at("schema_version").is_number_integer() || root.at("schema_version").get<long long>() != kSchemaVersion) {
    throw ConfigError("config.schema_version: unsupported (expected " + std::to_string(kSchemaVersion) + ")");
  }

  {
    Section s(section_json(root, "device", top), "device");
    c.device.kappa = s.number("kappa", c.device.kappa);
    c.device.epsilon = s.number("epsilon", c.device.epsilon);
    if (s.has("units")) {
      Section u(s.at("units"), "device.units");
      c.device.length_unit_um = u.opt_number("length_unit_um");
      c.device.energy_to_ghz = u.opt_number("energy_to_ghz");
      if (c.device.length_unit_um.has_value() != c.device.energy_to_ghz.has_value()) {
        throw ConfigError("device.units: give both length_unit_um and energy_to_ghz");
      }
    }
    if (s.has("profile")) {
      Section p(s.at("profile"), "device.profile");
      auto& pc = c.device.profile;
      pc.kind = p.string("kind", pc.kind);
      if (pc.kind == "analytic") {
        pc.pitch_um = p.number("pitch_um", pc.pitch_um);
        pc.width_um = p.number("width_um", pc.width_um);
        pc.depth_um = p.number("depth_um", pc.depth_um);
        if (p.has("centers_um")) pc.centers_um = p.seven("centers_um");
        if (p.has("widths_um")) pc.widths_um = p.seven("widths_um");
      } else if (pc.kind == "tabulated") {
        if (!p.has("path")) throw ConfigError("device.profile.path: required for a tabulated profile");
        pc.path = resolve(base_dir, p.string("path", ""));
      } else {
        throw ConfigError("device.profile.kind: expected 'analytic' or 'tabulated'");
      }
    }
    if (!(c.device.kappa >= 0.0)) throw ConfigError("device.kappa: must be non-negative");
    if (!(c.device.epsilon > 0.0)) throw ConfigError("device.epsilon: must be positive");
  }

  c.voltages = builtin_voltages();
  {
    const json& vj = section_json(root, "voltages", top);
    if (!vj.is_object()) throw ConfigError("voltages: expected an object");
    for (const auto& [name, v] : vj.items()) {
      const std::string where = "voltages." + name;
      VoltageVector vec;
      if (v.is_array()) {
        json wrap = {{"mv", v}};
        Section s(wrap, where);
        vec.mv = s.seven("mv");
      } else if (v.is_object()) {
        Section s(v, where);
        if (!s.has("csv")) throw ConfigError(where + ": expected a list of 7 values or {\"csv\": path}");
        const std::string path = resolve(base_dir, s.string("csv", ""));
        vec = load_voltage_csv(path);
        c.inputs.push_back({where, path, sha256_file(path)});
      } else {
        throw ConfigError(where + ": expected a list of 7 values or {\"csv\": path}");
      }
      rethrow_as_config(where, [&] { vec.validate(); return 0; });
      c.voltages[name] = vec;
    }
  }

  {
    Section s(section_json(root, "voltage_function", top), "voltage_function");
    auto& f = c.voltage_function;
    f.start = s.string("start", f.start);
    f.end = s.string("end", f.end);
    const std::string fam = s.string("family", family_name(f.family));
    if (fam == "beta") f.family = VoltageFamily::beta;
    else if (fam == "zeta") f.family = VoltageFamily::zeta;
    else throw ConfigError("voltage_function.family: expected 'beta' or 'zeta'");
    const std::string tgt = s.string("target", target_name(f.target));
    if (tgt == "II") f.target = TargetConfig::II;
    else if (tgt == "III") f.target = TargetConfig::III;
    else throw ConfigError("voltage_function.target: expected 'II' or 'III'");
    f.lambda_max = s.opt_number("lambda_max");
  }

  {
    Section s(section_json(root, "numerics", top), "numerics");
    auto& n = c.numerics;
    n.points_per_well = static_cast<int>(s.integer("points_per_well", n.points_per_well));
    n.margin_lengths = s.number("margin_lengths", n.margin_lengths);
    n.dt_ns = s.number("dt_ns", n.dt_ns);
    if (n.points_per_well < 4) throw ConfigError("numerics.points_per_well: must be at least 4");
    if (!(n.margin_lengths > 0.0)) throw ConfigError("numerics.margin_lengths: must be positive");
    if (!(n.dt_ns > 0.0)) throw ConfigError("numerics.dt_ns: must be positive");
    if (s.has("cn")) {
      Section cn(s.at("cn"), "numerics.cn");
      n.cn.rel_tol = cn.number("rel_tol", n.cn.rel_tol);
      n.cn.max_iterations = static_cast<int>(cn.integer("max_iterations", n.cn.max_iterations));
      n.cn.restart = static_cast<int>(cn.integer("restart", n.cn.restart));
      n.cn.rebuild_threshold = cn.number("rebuild_threshold", n.cn.rebuild_threshold);
      if (!(n.cn.rel_tol > 0.0) || n.cn.max_iterations < 1 || n.cn.restart < 1 || !(n.cn.rebuild_threshold >= 0.0)) {
        throw ConfigError("numerics.cn: tolerances and iteration limits must be positive");
      }
    }
    if (s.has("eigen")) {
      Section e(s.at("eigen"), "numerics.eigen");
      n.spectrum.k = static_cast<int>(e.integer("k", n.spectrum.k));
      n.spectrum.tol = e.number("tol", n.spectrum.tol);
      n.spectrum.max_iterations = static_cast<int>(e.integer("max_iterations", n.spectrum.max_iterations));
      n.spectrum.seed_states_per_well = static_cast<int>(e.integer("seed_states_per_well", n.spectrum.seed_states_per_well));
      if (n.spectrum.k < 6) throw ConfigError("numerics.eigen.k: at least 6 states are needed");
      if (!(n.spectrum.tol > 0.0) || n.spectrum.max_iterations < 1 || n.spectrum.seed_states_per_well < 1) {
        throw ConfigError("numerics.eigen: tolerances and iteration limits must be positive");
      }
    }
  }

  {
    Section s(section_json(root, "spectrum", top), "spectrum");
    if (s.has("idle")) c.spectrum.idle = s.string("idle", "");
    if (s.has("lambdas")) c.spectrum.lambdas = parse_value_list(s.at("lambdas"), "spectrum.lambdas");
    c.spectrum.kappa_zero = s.boolean("kappa_zero", false);
    for (double l : c.spectrum.lambdas) {
      if (!(l >= 0.0 && l <= 1.0)) throw ConfigError("spectrum.lambdas: values must lie in [0, 1]");
    }
  }

  {
    Section s(section_json(root, "propagate", top), "propagate");
    auto& p = c.propagate;
    p.t_ramp_ns = s.number("t_ramp_ns", p.t_ramp_ns);
    p.t_hold_ns = s.number("t_hold_ns", p.t_hold_ns);
    p.target = gate_kind(s, "target", p.target);
    if (s.has("snapshots_ns")) p.snapshots_ns = parse_value_list(s.at("snapshots_ns"), "propagate.snapshots_ns");
    p.overlap_states = static_cast<int>(s.integer("overlap_states", p.overlap_states));
    p.overlap_every = static_cast<int>(s.integer("overlap_every", p.overlap_every));
    if (!(p.t_ramp_ns > 0.0)) throw ConfigError("propagate.t_ramp_ns: must be positive");
    if (!(p.t_hold_ns >= 0.0)) throw ConfigError("propagate.t_hold_ns: must be non-negative");
    if (p.overlap_states < 0 || p.overlap_every < 1) throw ConfigError("propagate: bad overlap settings");
  }

  {
    Section s(section_json(root, "search", top), "search");
    auto& q = c.search;
    q.target = gate_kind(s, "target", q.target);
    q.ramps_ns = s.has("ramps_ns") ? parse_value_list(s.at("ramps_ns"), "search.ramps_ns") : sweep_default_ramps(q.target);
    q.holds_ns = s.has("holds_ns") ? parse_value_list(s.at("holds_ns"), "search.holds_ns") : sweep_default_holds(q.target);
    q.shared_ramp_down = s.boolean("shared_ramp_down", q.shared_ramp_down);
  }

  {
    Section s(section_json(root, "sensitivity", top), "sensitivity");
    auto& q = c.sensitivity;
    q.target = gate_kind(s, "target", q.target);
    q.center_ramp_ns = s.opt_number("center_ramp_ns");
    q.center_hold_ns = s.opt_number("center_hold_ns");
    q.window_ns = s.number("window_ns", q.window_ns);
    q.resolution_ns = s.number("resolution_ns", q.resolution_ns);
    if (!(q.window_ns >= 0.0)) throw ConfigError("sensitivity.window_ns: must be non-negative");
    if (!(q.resolution_ns > 0.0)) throw ConfigError("sensitivity.resolution_ns: must be positive");
  }

  {
    Section s(section_json(root, "volt_opt", top), "volt_opt");
    auto& o = c.volt_opt;
    if (s.has("config")) {
      const std::string name = s.string("config", "");
      o.config = rethrow_as_config("volt_opt.config", [&] { return parse_loss_config(name); });
    }
    o.initial = s.string("initial", o.initial);
    const long long budget = s.integer("budget", o.budget);
    if (budget < 0 || budget > 100000000) throw ConfigError("volt_opt.budget: out of range");
    o.budget = static_cast<int>(budget);
    if (s.has("weights")) o.weights = s.numbers("weights");
    o.band_low_ghz = s.number("band_low_ghz", o.band_low_ghz);
    o.band_high_ghz = s.number("band_high_ghz", o.band_high_ghz);
    o.min_detuning_ghz = s.number("min_detuning_ghz", o.min_detuning_ghz);
    o.min_gap_ghz = s.number("min_gap_ghz", o.min_gap_ghz);
    o.box_mv = s.number("box_mv", o.box_mv);
    if (s.has("steps_mv")) o.steps_mv = s.numbers("steps_mv");
    o.seed = s.unsigned_integer("seed", o.seed);
    o.max_well_shift_um = s.opt_number("max_well_shift_um");
    if (o.max_well_shift_um && !(*o.max_well_shift_um > 0.0)) {
      throw ConfigError("volt_opt.max_well_shift_um: must be positive");
    }
  }

  {
    Section s(section_json(root, "analyze", top), "analyze");
    auto& a = c.analyze;
    a.target = gate_kind(s, "target", a.target);
    a.gate = resolve(base_dir, s.string("gate", ""));
    a.trajectory = resolve(base_dir, s.string("trajectory", ""));
  }

  for (const auto& [k, v] : root.items()) {
    if (!top.count(k)) throw ConfigError("config." + k + ": unknown key");
  }

  if (c.device.profile.kind == "tabulated") {
    c.inputs.push_back({"device.profile", c.device.profile.path, sha256_file(c.device.profile.path)});
  }
  // Cross-section checks that need the whole config.
  c.voltage(c.voltage_function.start);
  c.voltage(c.voltage_function.end);
  c.voltage(c.volt_opt.initial);
  if (c.spectrum.idle) c.voltage(*c.spectrum.idle);
  rethrow_as_config("voltage_function", [&] { c.voltage_function_value(); return 0; });
  rethrow_as_config("device", [&] { c.device_model(); return 0; });
  rethrow_as_config("volt_opt", [&] {
    c.loss_spec().validate();
    return 0;
  });
  return c;
}

RunConfig RunConfig::load(const fs::path& path) {
  const std::string text = read_file(path);
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
  RunConfig c = from_json(j, path.parent_path());
  c.inputs.insert(c.inputs.begin(), InputFile{"config", path.string(), sha256_hex(text)});
  return c;
}

json RunConfig::to_json() const {
  json j;
  j["schema_version"] = kSchemaVersion;
  json dev = {{"kappa", device.kappa}, {"epsilon", device.epsilon}};
  const UnitSystem u = device_model().units;
  dev["units"] = {{"length_unit_um", u.length_unit_um}, {"energy_to_ghz", u.energy_to_ghz}};
  const auto& p = device.profile;
  if (p.kind == "analytic") {
    const ElectrodeLayout l = *device_model().profile.layout();
    dev["profile"] = {{"kind", "analytic"}, {"centers_um", l.centers_um}, {"widths_um", l.widths_um}, {"depth_um", l.depth_um}};
  } else {
    std::string digest;
    for (const auto& in : inputs)
      if (in.role == "device.profile") digest = in.sha256;
    dev["profile"] = {{"kind", "tabulated"}, {"path", p.path}, {"sha256", digest}};
  }
  j["device"] = dev;

  json volts = json::object();
  for (const auto& [name, v] : voltages) volts[name] = v.mv;
  j["voltages"] = volts;

  const VoltageFunction f = voltage_function_value();
  j["voltage_function"] = {{"start", voltage_function.start},
                           {"end", voltage_function.end},
                           {"family", family_name(voltage_function.family)},
                           {"target", target_name(voltage_function.target)},
                           {"lambda_max", f.lambda_max}};

  const auto& n = numerics;
  j["numerics"] = {{"points_per_well", n.points_per_well},
                   {"margin_lengths", n.margin_lengths},
                   {"dt_ns", n.dt_ns},
                   {"cn",
                    {{"rel_tol", n.cn.rel_tol},
                     {"max_iterations", n.cn.max_iterations},
                     {"restart", n.cn.restart},
                     {"rebuild_threshold", n.cn.rebuild_threshold}}},
                   {"eigen",
                    {{"k", n.spectrum.k},
                     {"tol", n.spectrum.tol},
                     {"max_iterations", n.spectrum.max_iterations},
                     {"seed_states_per_well", n.spectrum.seed_states_per_well}}}};

  j["spectrum"] = {{"idle", spectrum.idle.value_or(voltage_function.start)},
                   {"lambdas", spectrum.lambdas},
                   {"kappa_zero", spectrum.kappa_zero}};
  j["propagate"] = {{"t_ramp_ns", propagate.t_ramp_ns},     {"t_hold_ns", propagate.t_hold_ns},
                    {"target", to_string(propagate.target)}, {"snapshots_ns", propagate.snapshots_ns},
                    {"overlap_states", propagate.overlap_states}, {"overlap_every", propagate.overlap_every}};
  j["search"] = {{"target", to_string(search.target)},
                 {"ramps_ns", search.ramps_ns},
                 {"holds_ns", search.holds_ns},
                 {"shared_ramp_down", search.shared_ramp_down}};
  json sens = {{"target", to_string(sensitivity.target)},
               {"window_ns", sensitivity.window_ns},
               {"resolution_ns", sensitivity.resolution_ns}};
  sens["center_ramp_ns"] = sensitivity.center_ramp_ns ? json(*sensitivity.center_ramp_ns) : json(nullptr);
  sens["center_hold_ns"] = sensitivity.center_hold_ns ? json(*sensitivity.center_hold_ns) : json(nullptr);
  j["sensitivity"] = sens;

  const LossSpec ls = loss_spec();
  j["volt_opt"] = {{"config", to_string(volt_opt.config)},
                   {"initial", volt_opt.initial},
                   {"budget", volt_opt.budget},
                   {"weights", ls.weights},
                   {"band_low_ghz", ls.band_low_ghz},
                   {"band_high_ghz", ls.band_high_ghz},
                   {"min_detuning_ghz", ls.min_detuning_ghz},
                   {"min_gap_ghz", ls.min_gap_ghz},
                   {"box_mv", volt_opt.box_mv},
                   {"steps_mv", volt_opt.steps_mv},
                   {"seed", volt_opt.seed},
                   {"max_well_shift_um", volt_opt.max_well_shift_um ? json(*volt_opt.max_well_shift_um) : json(nullptr)}};
  json an = {{"target", to_string(analyze.target)}, {"gate", analyze.gate}, {"trajectory", analyze.trajectory}};
  json digests = json::object();
  for (const auto& in : inputs) {
    if (in.role != "config") digests[in.role] = in.sha256;
  }
  j["input_digests"] = digests;
  j["analyze"] = an;
  return j;
}

std::string RunConfig::hash() const {
  json j = to_json();
  return sha256_hex(j.dump());
}

DeviceModel RunConfig::device_model() const {
  DeviceModel d;
  d.kappa = device.kappa;
  d.epsilon = device.epsilon;
  if (device.length_unit_um) {
    d.units = UnitSystem::make(*device.length_unit_um, *device.energy_to_ghz);
  } else {
    d.units = UnitSystem::from_coulomb_strength(device.kappa > 0.0 ? device.kappa : 2326.0);
  }
  const auto& p = device.profile;
  if (p.kind == "analytic") {
    ElectrodeLayout l = ElectrodeLayout::uniform(p.pitch_um, p.width_um, p.depth_um);
    if (p.centers_um) l.centers_um = *p.centers_um;
    if (p.widths_um) l.widths_um = *p.widths_um;
    l.validate();
    d.profile = CouplingProfile::analytic(l);
  } else {
    d.profile = CouplingProfile::load_csv(p.path);
  }
  return d;
}

const VoltageVector& RunConfig::voltage(const std::string& name) const {
  const auto it = voltages.find(name);
  if (it == voltages.end()) throw ConfigError("unknown voltage vector '" + name + "'");
  return it->second;
}

VoltageFunction RunConfig::voltage_function_value() const {
  const auto& fc = voltage_function;
  VoltageFunction f = VoltageFunction::make(voltage(fc.start), voltage(fc.end), fc.family, fc.target);
  if (fc.lambda_max) {
    f.lambda_max = *fc.lambda_max;
    f.validate();
  }
  return f;
}

GridOptions RunConfig::grid_options() const {
  GridOptions g;
  g.points_per_well = numerics.points_per_well;
  g.margin_lengths = numerics.margin_lengths;
  return g;
}

LossSpec RunConfig::loss_spec() const {
  LossSpec s = LossSpec::defaults(volt_opt.config);
  if (volt_opt.weights) s.weights = *volt_opt.weights;
  s.band_low_ghz = volt_opt.band_low_ghz;
  s.band_high_ghz = volt_opt.band_high_ghz;
  s.min_detuning_ghz = volt_opt.min_detuning_ghz;
  s.min_gap_ghz = volt_opt.min_gap_ghz;
  return s;
}

OptimizerOptions RunConfig::optimizer_options() const {
  OptimizerOptions o;
  o.box_mv = volt_opt.box_mv;
  o.steps_mv = volt_opt.steps_mv;
  o.seed = volt_opt.seed;
  return o;
}

}  // namespace heligate
