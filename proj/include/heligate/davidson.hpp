#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <type_traits>

#include <Eigen/Dense>

#include "heligate/error.hpp"

namespace heligate {

template <typename Scalar>
using DenseMatrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

/// Hermitian operator known only through its action on blocks of vectors.
template <typename Scalar>
struct DavidsonProblem {
  int dim = 0;
  /// out = A in, for an n x b block. out is pre-sized.
  std::function<void(const DenseMatrix<Scalar>& in, DenseMatrix<Scalar>& out)> apply;
  /// Diagonal of A, used by the shift-inverse preconditioner.
  Eigen::VectorXd diagonal;
  /// Optional starting vectors (columns). Unit vectors on the smallest diagonal
  /// entries are used when empty.
  DenseMatrix<Scalar> guess;
};

struct DavidsonOptions {
  int k = 6;
  double tol = 1e-8;  // on ||A x - theta x||
  int max_iterations = 500;
  int max_subspace = 0;  // 0: max(8k, 40)
};

template <typename Scalar>
struct DavidsonResult {
  Eigen::VectorXd energies;
  DenseMatrix<Scalar> vectors;
  Eigen::VectorXd residuals;
  int iterations = 0;
  long matvecs = 0;
};

namespace detail {

// Orthogonalize the columns [first, end) of v against all earlier ones (two
// passes of classical Gram-Schmidt); drop columns that collapse.
template <typename Scalar>
Eigen::Index orthonormalize_tail(DenseMatrix<Scalar>& v, Eigen::Index first, Eigen::Index end) {
  Eigen::Index kept = first;
  for (Eigen::Index j = first; j < end; ++j) {
    auto col = v.col(j).eval();
    const double before = col.norm();
    if (!(before > 0.0)) continue;
    for (int pass = 0; pass < 2; ++pass) {
      if (kept > 0) {
        const auto coeff = (v.leftCols(kept).adjoint() * col).eval();
        col -= v.leftCols(kept) * coeff;
      }
    }
    const double after = col.norm();
    if (after < 1e-10 * before || after < 1e-300) continue;
    v.col(kept) = col / after;
    ++kept;
  }
  return kept;
}

}  // namespace detail

/// Lowest k eigenpairs of a Hermitian operator by block Davidson iteration
/// with diagonal (shift-inverse) preconditioning. Deterministic for a fixed
/// starting block.
template <typename Scalar>
DavidsonResult<Scalar> davidson_lowest(const DavidsonProblem<Scalar>& problem, const DavidsonOptions& opts) {
  using Mat = DenseMatrix<Scalar>;
  const int n = problem.dim;
  const int k = opts.k;
  if (k < 1) throw DomainError("davidson: k must be >= 1");
  if (!(opts.tol > 0.0)) throw DomainError("davidson: tolerance must be positive");
  if (n < k) throw DomainError("davidson: operator dimension smaller than k");
  if (problem.diagonal.size() != n) throw DomainError("davidson: diagonal length mismatch");
  const int max_sub = std::min(n, opts.max_subspace > 0 ? opts.max_subspace : std::max(8 * k, 40));
  if (max_sub < std::min(n, 2 * k)) throw DomainError("davidson: subspace limit too small");

  Mat v(n, max_sub);
  Eigen::Index m = 0;
  if (problem.guess.cols() > 0) {
    if (problem.guess.rows() != n) throw DomainError("davidson: guess has wrong dimension");
    const Eigen::Index g = std::min<Eigen::Index>(problem.guess.cols(), max_sub);
    v.leftCols(g) = problem.guess.leftCols(g);
    m = detail::orthonormalize_tail(v, 0, g);
  }
  if (m < k) {
    std::vector<int> order(n);
    for (int i = 0; i < n; ++i) order[i] = i;
    std::stable_sort(order.begin(), order.end(),
                     [&](int a, int b) { return problem.diagonal[a] < problem.diagonal[b]; });
    for (int i = 0; i < n && m < std::min(max_sub, std::max(k, 2 * k)); ++i) {
      v.col(m).setZero();
      v(order[i], m) = Scalar(1);
      m = detail::orthonormalize_tail(v, m, m + 1);
    }
  }
  if (m < k) throw ConvergenceError("davidson: could not build an initial subspace", 0.0);

  Mat av(n, max_sub);
  DavidsonResult<Scalar> res;
  {
    Mat out(n, m);
    problem.apply(v.leftCols(m), out);
    av.leftCols(m) = out;
    res.matvecs += m;
  }

  Eigen::VectorXd theta;
  Mat x, ax, r;
  Eigen::VectorXd rnorm(k);
  for (int iter = 1; iter <= opts.max_iterations; ++iter) {
    res.iterations = iter;
    Mat g = v.leftCols(m).adjoint() * av.leftCols(m);
    g = (0.5 * (g + g.adjoint())).eval();
    Eigen::SelfAdjointEigenSolver<Mat> es(g);
    theta = es.eigenvalues().head(k);
    const Mat s = es.eigenvectors().leftCols(k);
    x = v.leftCols(m) * s;
    ax = av.leftCols(m) * s;
    r = ax - x * theta.asDiagonal();
    bool done = true;
    for (int i = 0; i < k; ++i) {
      rnorm[i] = r.col(i).norm();
      if (!(rnorm[i] < opts.tol)) done = false;
    }
    if (done) break;
    if (iter == opts.max_iterations) {
      res.energies = theta;
      throw ConvergenceError("davidson: no convergence after " + std::to_string(iter) + " iterations",
                             rnorm.maxCoeff());
    }

    int unconverged = 0;
    for (int i = 0; i < k; ++i) unconverged += rnorm[i] >= opts.tol ? 1 : 0;
    if (m + unconverged > max_sub) {
      // Thick restart on the current Ritz vectors plus up to k extra ones.
      const Eigen::Index keep = std::min<Eigen::Index>(std::min<Eigen::Index>(m, 2 * k), max_sub - unconverged);
      const Mat s_keep = es.eigenvectors().leftCols(keep);
      const Mat nv = v.leftCols(m) * s_keep;
      const Mat nav = av.leftCols(m) * s_keep;
      v.leftCols(keep) = nv;
      av.leftCols(keep) = nav;
      m = keep;
    }

    const Eigen::Index first_new = m;
    for (int i = 0; i < k; ++i) {
      if (rnorm[i] < opts.tol) continue;
      auto col = v.col(m);
      for (int j = 0; j < n; ++j) {
        double denom = problem.diagonal[j] - theta[i];
        if (std::abs(denom) < 1e-8) denom = denom < 0 ? -1e-8 : 1e-8;
        col[j] = -r(j, i) / denom;
      }
      ++m;
    }
    m = detail::orthonormalize_tail(v, first_new, m);
    if (m == first_new) {
      // Preconditioned residuals lie in the subspace; fall back to raw residuals.
      for (int i = 0; i < k; ++i) {
        if (rnorm[i] < opts.tol) continue;
        v.col(m) = r.col(i);
        ++m;
      }
      m = detail::orthonormalize_tail(v, first_new, m);
      if (m == first_new) {
        throw ConvergenceError("davidson: subspace collapse", rnorm.maxCoeff());
      }
    }
    Mat out(n, m - first_new);
    problem.apply(v.middleCols(first_new, m - first_new), out);
    av.middleCols(first_new, m - first_new) = out;
    res.matvecs += m - first_new;
  }

  res.energies = theta;
  res.vectors = x;
  res.residuals = rnorm;
  return res;
}

}  // namespace heligate
