#include "heligate/spectrum.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>

#include "heligate/error.hpp"

namespace heligate {

namespace {

// Deterministic phase: the largest-magnitude coefficient is made real positive.
void fix_sign(Eigen::Ref<Eigen::VectorXd> v) {
  Eigen::Index imax = 0;
  v.cwiseAbs().maxCoeff(&imax);
  if (v[imax] < 0) v = -v;
}

TwoBodyState to_state(const BasisPtr& basis, const Eigen::VectorXd& v) {
  const int nl = basis->left.count, nr = basis->right.count;
  Eigen::MatrixXcd c = Eigen::Map<const Eigen::MatrixXd>(v.data(), nl, nr).cast<std::complex<double>>();
  return TwoBodyState(basis, std::move(c));
}

struct OneBody {
  Eigen::VectorXd energies;
  Eigen::MatrixXd vectors;
};

OneBody one_body(const Eigen::MatrixXd& t, const Eigen::VectorXd& v) {
  Eigen::MatrixXd h = t;
  h.diagonal() += v;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(h);
  OneBody ob{es.eigenvalues(), es.eigenvectors()};
  for (Eigen::Index j = 0; j < ob.vectors.cols(); ++j) fix_sign(ob.vectors.col(j));
  return ob;
}

int count_nodes(const Eigen::VectorXd& phi) {
  const double thr = 0.02 * phi.cwiseAbs().maxCoeff();
  int nodes = 0;
  int last_sign = 0;
  for (Eigen::Index i = 0; i < phi.size(); ++i) {
    if (std::abs(phi[i]) < thr) continue;
    const int s = phi[i] > 0 ? 1 : -1;
    if (last_sign != 0 && s != last_sign) ++nodes;
    last_sign = s;
  }
  return nodes;
}

// Dominant natural orbital of a reduced density matrix, made real.
Eigen::VectorXd dominant_orbital(const Eigen::MatrixXcd& rho) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(rho);
  Eigen::VectorXcd u = es.eigenvectors().col(rho.rows() - 1);
  Eigen::Index imax = 0;
  u.cwiseAbs().maxCoeff(&imax);
  const std::complex<double> ph = std::conj(u[imax]) / std::abs(u[imax]);
  return (u * ph).real();
}

}  // namespace

int QubitLabels::index_of(int left, int right) const {
  for (std::size_t i = 0; i < excitations.size(); ++i) {
    if (excitations[i] == std::pair{left, right}) return static_cast<int>(i);
  }
  return -1;
}

std::string QubitLabels::label(int index) const {
  const auto& e = excitations.at(index);
  return std::to_string(e.first) + std::to_string(e.second);
}

EigenSolution solve_spectrum(const OperatorCache& cache, const SpectrumOptions& opts) {
  const auto& basis = cache.basis_ptr();
  const int nl = basis->left.count, nr = basis->right.count;
  const int n = nl * nr;
  if (opts.k > n) throw DomainError("more eigenpairs requested than basis functions");

  // Seed subspace: lowest products of one-body states, with the Coulomb term
  // folded into each well as its additive (row/column mean) part.
  const Eigen::MatrixXd& u = cache.coulomb();
  const double umean = u.mean();
  const OneBody left = one_body(cache.kinetic_left(), cache.potential_left() + u.rowwise().mean());
  const OneBody right =
      one_body(cache.kinetic_right(), cache.potential_right() + u.colwise().mean().transpose() -
                                          Eigen::VectorXd::Constant(nr, umean));
  const int sl = std::min(opts.seed_states_per_well, nl), sr = std::min(opts.seed_states_per_well, nr);
  std::vector<std::pair<int, int>> pairs;
  for (int a = 0; a < sl; ++a)
    for (int b = 0; b < sr; ++b) pairs.emplace_back(a, b);
  std::stable_sort(pairs.begin(), pairs.end(), [&](auto p, auto q) {
    return left.energies[p.first] + right.energies[p.second] < left.energies[q.first] + right.energies[q.second];
  });
  const int g = std::min<int>(static_cast<int>(pairs.size()), std::max(2 * opts.k, opts.k + 4));

  DavidsonProblem<double> problem;
  problem.dim = n;
  problem.guess.resize(n, g);
  for (int j = 0; j < g; ++j) {
    Eigen::MatrixXd prod = left.vectors.col(pairs[j].first) * right.vectors.col(pairs[j].second).transpose();
    problem.guess.col(j) = Eigen::Map<Eigen::VectorXd>(prod.data(), n);
  }
  const Eigen::MatrixXd diag = cache.diagonal();
  problem.diagonal = Eigen::Map<const Eigen::VectorXd>(diag.data(), n);
  problem.apply = [&](const Eigen::MatrixXd& in, Eigen::MatrixXd& out) {
    for (Eigen::Index j = 0; j < in.cols(); ++j) {
      Eigen::Map<const Eigen::MatrixXd> c(in.col(j).data(), nl, nr);
      Eigen::Map<Eigen::MatrixXd> o(out.col(j).data(), nl, nr);
      cache.apply(c, o);
    }
  };
  DavidsonOptions dopts;
  dopts.k = opts.k;
  dopts.tol = opts.tol;
  dopts.max_iterations = opts.max_iterations;
  auto res = davidson_lowest(problem, dopts);

  EigenSolution sol;
  sol.iterations = res.iterations;
  for (int i = 0; i < opts.k; ++i) {
    Eigen::VectorXd v = res.vectors.col(i);
    fix_sign(v);
    sol.energies.push_back(res.energies[i]);
    sol.states.push_back(to_state(basis, v));
    sol.residuals.push_back(res.residuals[i]);
  }
  return sol;
}

EigenSolution dense_spectrum(const OperatorCache& cache, int k) {
  const Eigen::MatrixXd h = cache.dense();
  if (k > h.rows()) throw DomainError("more eigenpairs requested than basis functions");
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(h);
  EigenSolution sol;
  for (int i = 0; i < k; ++i) {
    Eigen::VectorXd v = es.eigenvectors().col(i);
    fix_sign(v);
    const Eigen::VectorXd hv = h * v;
    sol.energies.push_back(es.eigenvalues()[i]);
    sol.residuals.push_back((hv - es.eigenvalues()[i] * v).norm());
    sol.states.push_back(to_state(cache.basis_ptr(), v));
  }
  return sol;
}

double zz_coupling(std::span<const double> e) {
  if (e.size() < 5) throw DomainError("zz coupling needs at least five energies");
  return e[4] - e[2] - e[1] + e[0];
}

QubitLabels label_states(const EigenSolution& sol, const OperatorCache& cache) {
  const std::size_t count = sol.states.size();
  if (count < kExpectedLabels.size()) throw DomainError("labeling needs six eigenstates");
  QubitLabels out;
  out.excitations.resize(count);
  for (std::size_t i = 0; i < count; ++i) {
    const Eigen::MatrixXcd& c = sol.states[i].coeffs();
    const Eigen::MatrixXcd rho_l = c * c.adjoint();
    const Eigen::MatrixXcd rho_r = c.transpose() * c.conjugate();
    out.excitations[i] = {count_nodes(dominant_orbital(rho_l)), count_nodes(dominant_orbital(rho_r))};
  }

  // Near-degenerate pairs: node counting of a mixed state is meaningless, use
  // the overlap with uncoupled (kappa = 0) product states instead.
  std::set<std::size_t> mixed;
  for (std::size_t i = 0; i + 1 < count; ++i) {
    if (std::abs(sol.energies[i + 1] - sol.energies[i]) < 1e-6) {
      mixed.insert(i);
      mixed.insert(i + 1);
    }
  }
  if (!mixed.empty()) {
    const OneBody left = one_body(cache.kinetic_left(), cache.potential_left());
    const OneBody right = one_body(cache.kinetic_right(), cache.potential_right());
    const int maxq = 4;
    for (std::size_t i : mixed) {
      double best = -1.0;
      std::pair<int, int> lab{-1, -1};
      for (int a = 0; a < std::min<int>(maxq, left.vectors.cols()); ++a) {
        for (int b = 0; b < std::min<int>(maxq, right.vectors.cols()); ++b) {
          const Eigen::MatrixXd ref = left.vectors.col(a) * right.vectors.col(b).transpose();
          const double w = std::norm((ref.cast<std::complex<double>>().cwiseProduct(sol.states[i].coeffs())).sum());
          if (w > best) {
            best = w;
            lab = {a, b};
          }
        }
      }
      out.excitations[i] = lab;
      out.notes.push_back("state " + std::to_string(i) + " near-degenerate; labeled by product overlap " +
                          std::to_string(best));
      if (best < 0.5) out.ambiguous = true;
    }
  }

  std::set<std::pair<int, int>> seen;
  for (std::size_t i = 0; i < kExpectedLabels.size(); ++i) {
    if (!seen.insert(out.excitations[i]).second) {
      out.ambiguous = true;
      out.notes.push_back("label " + out.label(static_cast<int>(i)) + " assigned twice");
    }
  }
  out.matches_expected = true;
  for (std::size_t i = 0; i < kExpectedLabels.size(); ++i) {
    if (out.excitations[i] != kExpectedLabels[i]) {
      out.matches_expected = false;
      out.notes.push_back("state " + std::to_string(i) + " is |" + out.label(static_cast<int>(i)) +
                          ">, expected |" + std::to_string(kExpectedLabels[i].first) +
                          std::to_string(kExpectedLabels[i].second) + ">");
    }
  }
  return out;
}

EigenSolution spectrum_at(const DeviceModel& device, const BasisPtr& basis, const VoltageVector& v,
                          const SpectrumOptions& opts) {
  OperatorCache cache(basis, device.kappa, device.epsilon);
  auto [pl, pr] = potential_diagonals(*basis, device.profile, v, device.units);
  cache.set_potentials(std::move(pl), std::move(pr));
  return solve_spectrum(cache, opts);
}

std::vector<SpectrumRow> spectrum_sweep(const DeviceModel& device, const BasisPtr& basis,
                                        const VoltageFunction& f, std::span<const double> lambdas,
                                        const SpectrumOptions& opts) {
  std::vector<SpectrumRow> rows;
  rows.reserve(lambdas.size());
  for (double lam : lambdas) {
    const auto sol = spectrum_at(device, basis, voltage_at(f, lam), opts);
    SpectrumRow row;
    row.lambda = lam;
    for (double e : sol.energies) row.energies_ghz.push_back(device.units.to_ghz(e));
    row.zeta_ghz = device.units.to_ghz(zz_coupling(sol.energies));
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace heligate
