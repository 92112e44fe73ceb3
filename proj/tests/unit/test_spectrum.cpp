#include <cmath>

#include "common.hpp"
#include "heligate/davidson.hpp"
#include "heligate/spectrum.hpp"

using namespace heligate;
using testutil::small_basis;
using testutil::table;

namespace {

OperatorCache idle_cache(const DeviceModel& dev, const BasisPtr& basis, double kappa) {
  OperatorCache c(basis, kappa, dev.epsilon);
  auto [l, r] = potential_diagonals(*basis, dev.profile, table("I"), dev.units);
  c.set_potentials(l, r);
  return c;
}

}  // namespace

TEST_CASE("Davidson matches dense diagonalization on a 10x10 grid") {
  const DeviceModel dev;
  const auto basis = small_basis(dev, 10);
  const auto c = idle_cache(dev, basis, dev.kappa);
  const auto it = solve_spectrum(c);
  const auto ref = dense_spectrum(c, 6);
  REQUIRE(it.energies.size() == 6);
  for (int i = 0; i < 6; ++i) {
    CHECK(std::abs(it.energies[i] - ref.energies[i]) < 1e-8);
    CHECK(1.0 - std::norm(inner(it.states[i], ref.states[i])) < 1e-6);
    for (int j = 0; j < i; ++j) CHECK(std::abs(inner(it.states[i], it.states[j])) < 1e-8);
  }
}

TEST_CASE("kappa = 0 spectrum is additive") {
  const DeviceModel dev;
  const auto basis = small_basis(dev, 14);
  const auto c = idle_cache(dev, basis, 0.0);
  const auto sol = solve_spectrum(c);
  CHECK(std::abs(zz_coupling(sol.energies)) < 1e-9);

  const auto& l = c.potential_left();
  const auto& r = c.potential_right();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> el(one_body_hamiltonian(basis->left, l));
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> er(one_body_hamiltonian(basis->right, r));
  CHECK(std::abs(sol.energies[0] - el.eigenvalues()[0] - er.eigenvalues()[0]) < 1e-8);

  const auto labels = label_states(sol, c);
  for (int i = 0; i < 6; ++i) {
    const auto [a, b] = labels.excitations[i];
    CHECK(std::abs(sol.energies[i] - el.eigenvalues()[a] - er.eigenvalues()[b]) < 1e-8);
  }
  CHECK(labels.excitations[0] == std::pair{0, 0});
}

TEST_CASE("ZZ coupling arithmetic") {
  const std::vector<double> e = {0, 1, 2, 2.9, 3.1};
  CHECK(zz_coupling(e) == doctest::Approx(0.1).epsilon(1e-12));
  const std::vector<double> few = {0, 1, 2};
  CHECK_THROWS_AS(zz_coupling(few), DomainError);
}

TEST_CASE("idle built-in states carry the computational labels") {
  const DeviceModel dev;
  const auto basis = small_basis(dev, 20);
  const auto c = idle_cache(dev, basis, dev.kappa);
  const auto sol = solve_spectrum(c);
  const auto labels = label_states(sol, c);
  CHECK(labels.matches_expected);
  CHECK_FALSE(labels.ambiguous);
  for (int i = 0; i < 6; ++i) CHECK(labels.excitations[i] == kExpectedLabels[i]);
  CHECK(labels.index_of(1, 1) == 4);
  CHECK(labels.label(4) == "11");
}

TEST_CASE("Rayleigh quotient bounds the Davidson ground energy") {
  Eigen::MatrixXd a = Eigen::MatrixXd::Random(30, 30);
  a = (a + a.transpose()).eval();
  DavidsonProblem<double> p;
  p.dim = 30;
  p.apply = [&](const DenseMatrix<double>& in, DenseMatrix<double>& out) { out = a * in; };
  p.diagonal = a.diagonal();
  DavidsonOptions o;
  o.k = 1;
  const auto res = davidson_lowest(p, o);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(a);
  CHECK(std::abs(res.energies[0] - es.eigenvalues()[0]) < 1e-8);
  for (int t = 0; t < 5; ++t) {
    const Eigen::VectorXd x = Eigen::VectorXd::Random(30);
    CHECK(res.energies[0] <= x.dot(a * x) / x.squaredNorm() + 1e-12);
  }
}

TEST_CASE("Davidson reports non-convergence") {
  Eigen::MatrixXd a = Eigen::MatrixXd::Random(50, 50);
  a = (a + a.transpose()).eval();
  DavidsonProblem<double> p;
  p.dim = 50;
  p.apply = [&](const DenseMatrix<double>& in, DenseMatrix<double>& out) { out = a * in; };
  p.diagonal = a.diagonal();
  DavidsonOptions o;
  o.max_iterations = 1;
  CHECK_THROWS_AS(davidson_lowest(p, o), ConvergenceError);
}

TEST_CASE("built-in idle ZZ is far below a beta-style detuned configuration") {
  // The zeta vectors were tuned for small ZZ; a uniformly scaled copy is not.
  const DeviceModel dev;
  GridOptions g;
  g.points_per_well = 20;
  auto zeta_of = [&](const VoltageVector& v) {
    const auto b = auto_basis(dev, v, g);
    const auto s = spectrum_at(dev, b, v);
    return dev.units.to_ghz(zz_coupling(s.energies));
  };
  const double z = zeta_of(table("I"));
  VoltageVector beta = table("I");
  beta.mv[3] *= 1.4;
  const double zb = zeta_of(beta);
  MESSAGE("zeta(I) = " << z << " GHz, zeta(beta-style) = " << zb << " GHz");
  CHECK(std::abs(z) < std::abs(zb));
}

TEST_CASE("spectrum sweep rows") {
  const DeviceModel dev;
  const auto f = VoltageFunction::make(table("I"), table("II"), VoltageFamily::zeta, TargetConfig::II);
  const VoltageVector ends[2] = {table("I"), table("II")};
  GridOptions g;
  g.points_per_well = 12;
  const auto basis = auto_basis(dev, std::span<const VoltageVector>(ends, 2), g);
  const std::vector<double> lambdas = {0.0, 0.5, 1.0};
  const auto rows = spectrum_sweep(dev, basis, f, lambdas);
  REQUIRE(rows.size() == 3);
  for (const auto& r : rows) {
    CHECK(r.energies_ghz.size() == 6);
    CHECK(r.zeta_ghz == doctest::Approx(zz_coupling(r.energies_ghz)));
  }
}
