#include <pybind11/complex.h>
#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "heligate/config.hpp"
#include "heligate/io.hpp"
#include "heligate/search.hpp"
#include "heligate/voltage_opt.hpp"

namespace py = pybind11;
using namespace heligate;

namespace {

VoltageVector to_voltages(const std::vector<double>& mv) {
  if (mv.size() != kElectrodeCount) throw py::value_error("expected 7 electrode voltages");
  VoltageVector v;
  std::copy(mv.begin(), mv.end(), v.mv.begin());
  v.validate();
  return v;
}

std::vector<double> from_voltages(const VoltageVector& v) { return {v.mv.begin(), v.mv.end()}; }

GridOptions grid(int points_per_well) {
  GridOptions g;
  g.points_per_well = points_per_well;
  return g;
}

py::dict report_dict(const FidelityReport& r) {
  py::dict d;
  d["fidelity"] = r.fidelity;
  d["theta_left"] = r.angles.theta_left;
  d["theta_right"] = r.angles.theta_right;
  d["global_phase"] = r.angles.global_phase;
  d["swap_error"] = r.swap_error;
  d["leakage_error"] = r.leakage_error;
  d["gate"] = GateMatrix(r.gate);
  d["flat_landscape"] = r.flat_landscape;
  return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Two-electron double-well gate simulation";

  py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
  py::register_exception<DomainError>(m, "DomainError", PyExc_ValueError);
  py::register_exception<ConvergenceError>(m, "ConvergenceError", PyExc_RuntimeError);

  m.def("builtin_voltages", [] {
    std::map<std::string, std::vector<double>> out;
    for (const auto& [k, v] : builtin_voltages()) out[k] = from_voltages(v);
    return out;
  });

  m.def("alpha", [](int electrode, double x_um) {
    return alpha_eval(CouplingProfile::analytic(ElectrodeLayout::uniform()), electrode, x_um);
  }, py::arg("electrode"), py::arg("x_um"), "Analytic coupling of electrode k (0-based) at x.");

  m.def("ramp", [](double t_ramp_ns, double t_hold_ns, double lambda_max, double t_ns) {
    return lambda_at(RampSchedule(t_ramp_ns, t_hold_ns), lambda_max, t_ns);
  }, py::arg("t_ramp_ns"), py::arg("t_hold_ns"), py::arg("lambda_max"), py::arg("t_ns"));

  m.def("spectrum", [](const std::vector<double>& mv, int points_per_well, double kappa) {
    DeviceModel dev;
    dev.kappa = kappa;
    const VoltageVector v = to_voltages(mv);
    py::gil_scoped_release release;
    const auto sol = spectrum_at(dev, auto_basis(dev, v, grid(points_per_well)), v);
    std::vector<double> ghz;
    for (double e : sol.energies) ghz.push_back(dev.units.to_ghz(e));
    return ghz;
  }, py::arg("voltages_mv"), py::arg("points_per_well") = 24, py::arg("kappa") = 2326.0,
     "Six lowest two-electron energies in GHz.");

  m.def("zz_coupling", [](const std::vector<double>& e) { return zz_coupling(e); });

  m.def("target_gate", [](const std::string& name) { return GateMatrix(target_gate(parse_gate_kind(name))); });
  m.def("average_fidelity", [](const GateMatrix& g, const GateMatrix& t) { return average_fidelity(g, t); });
  m.def("optimize_rotations", [](const GateMatrix& u, const std::string& target) {
    return report_dict(optimize_rotations(u, target_gate(parse_gate_kind(target))));
  });
  m.def("canonical_gate", [](const GateMatrix& u) { return GateMatrix(canonical_gate(u)); });
  m.def("swap_error", [](const GateMatrix& u) { return swap_error(u); });
  m.def("leakage_error", [](const GateMatrix& u) { return leakage_error(u); });

  m.def("gate_matrix", [](const std::vector<double>& start, const std::vector<double>& end, double t_ramp_ns,
                          double t_hold_ns, double dt_ns, int points_per_well) {
    const DeviceModel dev;
    const VoltageVector ends[2] = {to_voltages(start), to_voltages(end)};
    py::gil_scoped_release release;
    const auto basis = auto_basis(dev, std::span<const VoltageVector>(ends, 2), grid(points_per_well));
    const auto sys = GateSystem::build(dev, basis, ends[0]);
    const auto f = VoltageFunction::make(ends[0], ends[1], VoltageFamily::zeta, TargetConfig::II);
    return GateMatrix(gate_matrix_cold(sys, f, t_ramp_ns, t_hold_ns, dt_ns));
  }, py::arg("start_mv"), py::arg("end_mv"), py::arg("t_ramp_ns"), py::arg("t_hold_ns"), py::arg("dt_ns") = 0.002,
     py::arg("points_per_well") = 24, "Qubit-subspace matrix of one ramp/hold/ramp gate.");

  m.def("loss", [](const std::string& config, const std::vector<double>& energies_ghz) {
    const auto b = loss_from_energies(LossSpec::defaults(parse_loss_config(config)), energies_ghz);
    py::dict terms;
    for (const auto& t : b.terms) terms[py::str(t.name)] = t.value;
    return py::make_tuple(b.total, terms);
  }, py::arg("config"), py::arg("energies_ghz"));

  m.def("config_hash", [](const std::string& path) { return RunConfig::load(path).hash(); });
  m.def("voltage_csv", [](const std::vector<double>& mv) { return voltage_csv(to_voltages(mv)); });
  m.def("parse_voltage_csv", [](const std::string& text) { return from_voltages(parse_voltage_csv(text)); });
}
