#include <cmath>
#include <filesystem>

#include "common.hpp"
#include "heligate/electrostatics.hpp"
#include "heligate/io.hpp"

using namespace heligate;
using testutil::table;

TEST_CASE("analytic coupling at an electrode center") {
  const auto layout = ElectrodeLayout::uniform();
  const auto p = CouplingProfile::analytic(layout);
  for (int k = 0; k < kElectrodeCount; ++k) {
    CHECK(alpha_eval(p, k, layout.centers_um[k]) == doctest::Approx(2.0 / M_PI * std::atan(0.5)).epsilon(1e-12));
  }
  CHECK(alpha_eval(p, 3, 0.0) == doctest::Approx(0.29517).epsilon(1e-5));
}

TEST_CASE("analytic coupling decays far away and is mirror symmetric") {
  const auto layout = ElectrodeLayout::uniform();
  const auto p = CouplingProfile::analytic(layout);
  const double c = layout.centers_um[2], w = layout.widths_um[2];
  const double far = alpha_eval(p, 2, c + 1e3 * w);
  CHECK(far < 1e-3);
  CHECK(alpha_eval(p, 2, c + 2e3 * w) < far);
  for (double d : {0.0, 0.013, 0.1, 0.77, 5.0}) CHECK(alpha_eval(p, 2, c + d) == alpha_eval(p, 2, c - d));
}

TEST_CASE("alpha domain errors") {
  const auto p = CouplingProfile::analytic(ElectrodeLayout::uniform());
  CHECK_THROWS_AS(alpha_eval(p, -1, 0.0), DomainError);
  CHECK_THROWS_AS(alpha_eval(p, 7, 0.0), DomainError);
  std::vector<double> x = {-1.0, 0.0, 1.0};
  std::array<std::vector<double>, kElectrodeCount> a;
  for (auto& col : a) col = {0.1, 0.2, 0.1};
  const auto t = CouplingProfile::tabulated(x, a);
  CHECK(alpha_eval(t, 0, 0.0) == doctest::Approx(0.2));
  CHECK_THROWS_AS(alpha_eval(t, 0, 1.5), DomainError);
}

TEST_CASE("tabulated profile reproduces its samples and survives a csv round trip") {
  const auto analytic = CouplingProfile::analytic(ElectrodeLayout::uniform());
  std::vector<double> x;
  for (int i = 0; i <= 200; ++i) x.push_back(-2.0 + 0.02 * i);
  const auto path = std::filesystem::temp_directory_path() / "heligate_profile_test.csv";
  analytic.save_csv(path.string(), x);
  const auto t = CouplingProfile::load_csv(path.string());
  for (int k = 0; k < kElectrodeCount; ++k) {
    CHECK(alpha_eval(t, k, x[57]) == doctest::Approx(alpha_eval(analytic, k, x[57])).epsilon(1e-12));
    // between samples the cubic stays close to the smooth profile
    CHECK(std::abs(alpha_eval(t, k, 0.011) - alpha_eval(analytic, k, 0.011)) < 5e-4);
  }
  std::filesystem::remove(path);
}

TEST_CASE("surface potential sums electrode contributions") {
  const auto p = CouplingProfile::analytic(ElectrodeLayout::uniform());
  const auto u = UnitSystem::from_coulomb_strength(2326.0);
  VoltageVector zero;
  for (double x : {-1.3, 0.0, 0.4}) CHECK(surface_potential(p, zero, x, u) == 0.0);

  VoltageVector one;
  one.mv[2] = 1.0;
  const double x = 0.37;
  CHECK(surface_potential(p, one, x, u) == doctest::Approx(-alpha_eval(p, 2, x) * u.millielectronvolt()));

  const auto& v = table("I");
  double sum = 0.0;
  for (int k = 0; k < kElectrodeCount; ++k) sum += alpha_eval(p, k, x) * v.mv[k];
  CHECK(surface_potential(p, v, x, u) == doctest::Approx(-sum * u.millielectronvolt()).epsilon(1e-13));
}

TEST_CASE("voltage function interpolation") {
  const auto f = VoltageFunction::make(table("I"), table("II"), VoltageFamily::zeta, TargetConfig::II);
  CHECK(voltage_at(f, 0.0) == table("I"));
  CHECK(voltage_at(f, 1.0) == table("II"));
  const auto cz = VoltageFunction::make(table("I"), table("III"), VoltageFamily::zeta, TargetConfig::III);
  CHECK(voltage_at(cz, 0.5).mv[1] == 197.355);
  CHECK_THROWS_AS(voltage_at(f, -0.01), DomainError);
  CHECK_THROWS_AS(voltage_at(f, 1.01), DomainError);
  CHECK(VoltageFunction::make(table("I"), table("II"), VoltageFamily::beta, TargetConfig::II).lambda_max == kBetaSwapLambda);
  CHECK(VoltageFunction::make(table("I"), table("III"), VoltageFamily::beta, TargetConfig::III).lambda_max == 1.0);
}

TEST_CASE("double erf ramp") {
  const RampSchedule s(1.0, 20.0);
  const double lmax = 0.8;
  CHECK(lambda_at(s, lmax, 0.5) == doctest::Approx(0.5 * lmax).epsilon(1e-3));
  CHECK(lambda_at(s, lmax, s.t_gate_ns() / 2) == doctest::Approx(lmax).epsilon(1e-3));
  CHECK(std::abs(lambda_at(s, lmax, 0.0) - lmax * (1 - std::erf(2.0)) / 2) < 1e-12);
  CHECK(lambda_at(RampSchedule(1.0, 0.0), 1.0, 0.0) == doctest::Approx(0.002339).epsilon(1e-3));
  CHECK_THROWS_AS(lambda_at(s, lmax, -1e-9), DomainError);
  CHECK_THROWS_AS(lambda_at(s, lmax, s.t_gate_ns() + 1e-9), DomainError);
  CHECK_THROWS_AS(RampSchedule(0.0, 1.0), DomainError);
}

TEST_CASE("ramp pieces agree with the full ramp") {
  const RampSchedule s(0.7, 6.0);
  for (double t = 0.0; t <= s.t_hold_ns; t += 0.137) CHECK(lambda_ramp_up(0.7, 1.0, t) == lambda_at(s, 1.0, t));
  for (double t = 0.0; t <= 1.4; t += 0.1) {
    CHECK(std::abs(lambda_ramp_down(0.7, 1.0, t) - lambda_at(s, 1.0, s.t_hold_ns + t)) < 1e-14);
  }
}

TEST_CASE("unit system bookkeeping") {
  const auto u = UnitSystem::from_coulomb_strength(2326.0);
  CHECK(u.length_unit_um == doctest::Approx(0.12309).epsilon(1e-4));
  CHECK(2 * M_PI * u.energy_to_ghz * u.time_of_unit_ns == doctest::Approx(1.0).epsilon(1e-14));
  CHECK_THROWS_AS(UnitSystem::make(-1.0, 1.0), DomainError);
  CHECK_THROWS_AS(UnitSystem::from_coulomb_strength(0.0), DomainError);
}

TEST_CASE("built-in vectors round-trip through the voltage csv") {
  for (const char* name : {"I", "II", "III"}) {
    const auto& v = table(name);
    const std::string text = voltage_csv(v);
    const auto back = parse_voltage_csv(text);
    CHECK(back == v);
    CHECK(voltage_csv(back) == text);
  }
}
