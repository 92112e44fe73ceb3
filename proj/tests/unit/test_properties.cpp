#include <cmath>
#include <random>

#include "common.hpp"
#include "heligate/gate.hpp"
#include "heligate/io.hpp"
#include "heligate/propagation.hpp"
#include "heligate/voltage_opt.hpp"

using namespace heligate;

namespace {

GateMatrix random_unitary(std::mt19937_64& rng) {
  std::normal_distribution<double> n;
  GateMatrix m;
  for (int i = 0; i < 16; ++i) m.data()[i] = {n(rng), n(rng)};
  return Eigen::HouseholderQR<GateMatrix>(m).householderQ();
}

}  // namespace

TEST_CASE("fidelity is bounded and phase invariant for random gates") {
  std::mt19937_64 rng(21);
  std::uniform_real_distribution<double> phi(-M_PI, M_PI);
  for (int i = 0; i < 200; ++i) {
    const GateMatrix u = random_unitary(rng), t = random_unitary(rng);
    const double f = average_fidelity(u, t);
    CHECK(f >= 0.2 - 1e-12);  // (4 + |Tr M|^2)/20 for unitary M
    CHECK(f <= 1.0 + 1e-12);
    CHECK(std::abs(average_fidelity(std::polar(1.0, phi(rng)) * u, t) - f) < 1e-12);
    const auto rep = optimize_rotations(u, t);
    CHECK(rep.fidelity >= f - 1e-12);
    CHECK(std::abs(average_fidelity(rep.gate, t) - rep.fidelity) < 1e-10);
    CHECK(std::abs(rep.swap_error - swap_error(rep.gate)) < 1e-12);
    const GateMatrix g = canonical_gate(u);
    for (int k = 0; k < 3; ++k) CHECK(std::abs(std::arg(g(k, k))) < 1e-12);
    // z rotations preserve unitarity and element moduli
    const GateMatrix r = apply_z_rotations(u, {phi(rng), phi(rng), phi(rng)});
    CHECK((r.cwiseAbs() - u.cwiseAbs()).cwiseAbs().maxCoeff() < 1e-14);
  }
}

TEST_CASE("ramp is symmetric, bounded and monotone on each edge") {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int i = 0; i < 50; ++i) {
    const RampSchedule s(0.05 + 3 * u(rng), 10 * u(rng));
    const double lmax = 0.1 + 0.9 * u(rng);
    double prev = -1.0;
    for (int k = 0; k <= 200; ++k) {
      const double t = std::min(s.t_gate_ns(), s.t_gate_ns() * k / 200.0);
      const double l = lambda_at(s, lmax, t);
      CHECK(l >= 0.0);
      CHECK(l <= lmax);
      CHECK(std::abs(l - lambda_at(s, lmax, s.t_gate_ns() - t)) < 1e-12);
      if (t <= s.t_gate_ns() / 2) CHECK(l >= prev - 1e-15);
      prev = l;
    }
  }
}

TEST_CASE("Crank-Nicolson preserves the norm for random potentials and steps") {
  const DeviceModel dev;
  std::mt19937_64 rng(8);
  std::normal_distribution<double> n(0.0, 0.5);
  std::uniform_real_distribution<double> u(-0.5, 0.5);
  const auto basis = testutil::small_basis(dev, 9);
  for (int trial = 0; trial < 10; ++trial) {
    VoltageVector v = testutil::table("I");
    for (double& x : v.mv) x += n(rng);
    OperatorCache c(basis, dev.kappa, dev.epsilon);
    auto [l, r] = potential_diagonals(*basis, dev.profile, v, dev.units);
    c.set_potentials(l, r);
    auto s = testutil::random_state(basis, 100 + trial);
    for (int k = 0; k < 5; ++k) {
      s = crank_nicolson_step(c, s, u(rng));
      CHECK(std::abs(s.norm() - 1.0) < 1e-10);
    }
    // Hermiticity on random pairs
    const auto a = testutil::random_state(basis, 200 + trial), b = testutil::random_state(basis, 300 + trial);
    const auto x = inner(a, apply_hamiltonian(c, b)), y = std::conj(inner(b, apply_hamiltonian(c, a)));
    CHECK(std::abs(x - y) < 1e-12 * std::max(1.0, std::abs(x)));
  }
}

TEST_CASE("number and voltage text round trips for random values") {
  std::mt19937_64 rng(13);
  std::uniform_real_distribution<double> u(-300.0, 300.0);
  std::uniform_int_distribution<int> e(-30, 30);
  for (int i = 0; i < 2000; ++i) {
    const double x = std::ldexp(u(rng), e(rng));
    CHECK(std::stod(format_number(x)) == x);
  }
  for (int i = 0; i < 100; ++i) {
    VoltageVector v;
    for (double& x : v.mv) x = i % 2 ? std::round(u(rng) * 100) / 100 : u(rng);
    const auto text = voltage_csv(v);
    CHECK(parse_voltage_csv(text) == v);
    CHECK(voltage_csv(parse_voltage_csv(text)) == text);
  }
}

TEST_CASE("loss is non-negative and hinges are monotone") {
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> u(0.0, 30.0);
  for (int i = 0; i < 500; ++i) {
    std::vector<double> e(6);
    for (double& x : e) x = u(rng);
    std::sort(e.begin(), e.end());
    for (auto c : {LossConfig::zeta_only, LossConfig::I, LossConfig::II, LossConfig::III}) {
      const auto b = loss_from_energies(LossSpec::defaults(c), e);
      CHECK(b.total >= 0.0);
      double sum = 0.0;
      for (const auto& t : b.terms) sum += t.value;
      CHECK(sum == b.total);
    }
    const double g = u(rng), t = u(rng);
    CHECK(hinge(g, t) >= hinge(g + 0.1, t));
  }
}
