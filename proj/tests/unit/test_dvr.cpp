#include <cmath>

#include "common.hpp"
#include "heligate/dvr.hpp"

using namespace heligate;
using testutil::random_state;
using testutil::small_basis;

TEST_CASE("Colbert-Miller kinetic matrix") {
  const auto t = kinetic_matrix(DvrGrid::make(0.0, 1.0, 9));
  CHECK(t(4, 4) == doctest::Approx(M_PI * M_PI / 6).epsilon(1e-15));
  CHECK(t(4, 5) == -1.0);
  CHECK(t(3, 4) == -1.0);
  CHECK(t(2, 4) == 0.25);
  CHECK(t == t.transpose());
  const auto t2 = kinetic_matrix(DvrGrid::make(0.0, 0.5, 9));
  CHECK(t2(0, 0) == doctest::Approx(4 * M_PI * M_PI / 6));
}

TEST_CASE("softened Coulomb kernel") {
  // grids may not overlap, so "coincident" is 1e-12 apart
  const auto b = make_basis(DvrGrid::make(-1.5, 1.5, 2), DvrGrid::make(1e-12, 1.5, 2));
  const auto u = coulomb_diagonal(*b, 2326.0, 0.01);
  CHECK(u(0, 0) == doctest::Approx(2326.0 / std::sqrt(2.2501)).epsilon(1e-12));
  CHECK(u(0, 0) == doctest::Approx(1550.63).epsilon(1e-5));
  CHECK(u(1, 0) == doctest::Approx(232600.0).epsilon(1e-12));
  CHECK(std::isfinite(u(1, 0)));
  CHECK(coulomb_diagonal(*b, 0.0, 0.01).isZero(0.0));
}

TEST_CASE("potential diagonals sample the surface potential") {
  const DeviceModel dev;
  const auto basis = small_basis(dev);
  const auto [l0, r0] = potential_diagonals(*basis, dev.profile, VoltageVector{}, dev.units);
  CHECK(l0.isZero(0.0));
  CHECK(r0.isZero(0.0));
  const auto& v = testutil::table("I");
  const auto [l, r] = potential_diagonals(*basis, dev.profile, v, dev.units);
  for (int i = 0; i < basis->left.count; ++i)
    CHECK(l[i] == surface_potential(dev.profile, v, dev.units.to_um(basis->left.point(i)), dev.units));
  for (int i = 0; i < basis->right.count; ++i)
    CHECK(r[i] == surface_potential(dev.profile, v, dev.units.to_um(basis->right.point(i)), dev.units));
  // Built-in idle wells are nearly, not exactly, symmetric.
  CHECK(std::abs(l.minCoeff() - r.minCoeff()) < 0.05 * std::abs(l.minCoeff()));
}

TEST_CASE("idle wells sit either side of the barrier") {
  const DeviceModel dev;
  const auto w = locate_wells(dev, testutil::table("I"));
  CHECK(w.left_minimum < w.barrier);
  CHECK(w.barrier < w.right_minimum);
  const auto basis = small_basis(dev, 16);
  CHECK(basis->left.count == 16);
  CHECK(basis->right.count == 16);
  CHECK(basis->left.back() < basis->right.start);
  CHECK(basis->left.start < w.left_minimum);
  CHECK(basis->right.back() > w.right_minimum);
}

TEST_CASE("union basis covers both configurations") {
  const DeviceModel dev;
  const VoltageVector both[2] = {testutil::table("I"), testutil::table("II")};
  GridOptions g;
  g.points_per_well = 12;
  const auto b = auto_basis(dev, std::span<const VoltageVector>(both, 2), g);
  for (const auto& v : both) {
    const auto w = locate_wells(dev, v);
    CHECK(b->left.start <= w.left_turning[0]);
    CHECK(b->right.back() >= w.right_turning[1]);
  }
}

TEST_CASE("Hamiltonian action") {
  DeviceModel dev;
  const auto basis = small_basis(dev);
  const auto [l, r] = potential_diagonals(*basis, dev.profile, testutil::table("I"), dev.units);

  SUBCASE("zero state maps to zero") {
    OperatorCache c(basis, dev.kappa, dev.epsilon);
    c.set_potentials(l, r);
    CHECK(apply_hamiltonian(c, TwoBodyState::zeros(basis)).coeffs().isZero(0.0));
  }

  SUBCASE("separable product eigenstates at kappa = 0") {
    OperatorCache c(basis, 0.0, dev.epsilon);
    c.set_potentials(l, r);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> el(one_body_hamiltonian(basis->left, l));
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> er(one_body_hamiltonian(basis->right, r));
    for (auto [a, b] : {std::pair{0, 0}, std::pair{1, 2}, std::pair{3, 0}}) {
      const Eigen::MatrixXd outer = el.eigenvectors().col(a) * er.eigenvectors().col(b).transpose();
      TwoBodyState s(basis, outer.cast<std::complex<double>>());
      const auto hs = apply_hamiltonian(c, s);
      const double e = el.eigenvalues()[a] + er.eigenvalues()[b];
      CHECK((hs.coeffs() - e * s.coeffs()).cwiseAbs().maxCoeff() < 1e-10 * std::max(1.0, std::abs(e)));
    }
  }

  SUBCASE("hermiticity and dense agreement") {
    OperatorCache c(basis, dev.kappa, dev.epsilon);
    c.set_potentials(l, r);
    const auto psi = random_state(basis, 1), phi = random_state(basis, 2);
    const auto a = inner(phi, apply_hamiltonian(c, psi));
    const auto b = std::conj(inner(psi, apply_hamiltonian(c, phi)));
    CHECK(std::abs(a - b) < 1e-12 * std::max(1.0, std::abs(a)));
    const Eigen::MatrixXd d = c.dense();
    CHECK((d - d.transpose()).cwiseAbs().maxCoeff() == 0.0);
    const Eigen::VectorXcd flat = Eigen::Map<const Eigen::VectorXcd>(psi.coeffs().data(), psi.coeffs().size());
    const Eigen::VectorXcd hd = d * flat;
    const auto hs = apply_hamiltonian(c, psi);
    CHECK((hd - Eigen::Map<const Eigen::VectorXcd>(hs.coeffs().data(), hd.size())).norm() < 1e-9 * hd.norm());
    CHECK((c.diagonal().reshaped() - d.diagonal()).norm() < 1e-9 * d.diagonal().norm());
  }
}

TEST_CASE("inner product") {
  const DeviceModel dev;
  const auto basis = small_basis(dev);
  const auto a = random_state(basis, 3), b = random_state(basis, 4);
  CHECK(std::abs(inner(a, a) - 1.0) < 1e-14);
  CHECK(std::abs(inner(a, b) - std::conj(inner(b, a))) < 1e-15);
  const auto other = make_basis(basis->left, DvrGrid::make(basis->right.start, basis->right.spacing, 11));
  CHECK_THROWS_AS(inner(a, TwoBodyState::zeros(other)), BasisMismatch);
}
