#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <vector>

namespace heligate {

struct SimplexOptions {
  double initial_step = 0.1;
  double f_tol = 1e-12;  // spread of simplex values
  double x_tol = 1e-10;  // simplex diameter
  int max_evaluations = 2000;
  /// Edge directions of the initial simplex (unit vectors); coordinate axes when empty.
  std::vector<std::vector<double>> directions;
};

struct SimplexResult {
  std::vector<double> x;
  double value = 0.0;
  int evaluations = 0;
  bool converged = false;
};

/// Nelder-Mead minimization with the standard coefficients (1, 2, 1/2, 1/2).
inline SimplexResult nelder_mead(const std::function<double(const std::vector<double>&)>& f,
                                 std::vector<double> x0, const SimplexOptions& opts = {}) {
  const std::size_t n = x0.size();
  std::vector<std::vector<double>> pts(n + 1, x0);
  for (std::size_t i = 0; i < n; ++i) {
    if (opts.directions.size() == n) {
      for (std::size_t d = 0; d < n; ++d) pts[i + 1][d] += opts.initial_step * opts.directions[i][d];
    } else {
      pts[i + 1][i] += opts.initial_step;
    }
  }
  std::vector<double> vals(n + 1);
  SimplexResult res;
  auto eval = [&](const std::vector<double>& x) {
    ++res.evaluations;
    return f(x);
  };
  for (std::size_t i = 0; i <= n; ++i) vals[i] = eval(pts[i]);
  std::vector<std::size_t> idx(n + 1);
  std::vector<double> centroid(n), xr(n), xe(n), xc(n);
  while (res.evaluations + static_cast<int>(n) + 2 <= opts.max_evaluations) {
    std::iota(idx.begin(), idx.end(), 0);
    std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return vals[a] < vals[b]; });
    const std::size_t best = idx[0], worst = idx[n], second = idx[n - 1];
    double diam = 0.0;
    for (std::size_t i = 1; i <= n; ++i)
      for (std::size_t d = 0; d < n; ++d) diam = std::max(diam, std::abs(pts[idx[i]][d] - pts[best][d]));
    if (diam <= opts.x_tol || vals[worst] - vals[best] <= opts.f_tol) {
      res.converged = true;
      break;
    }
    std::fill(centroid.begin(), centroid.end(), 0.0);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t d = 0; d < n; ++d) centroid[d] += pts[idx[i]][d] / static_cast<double>(n);
    for (std::size_t d = 0; d < n; ++d) xr[d] = centroid[d] + (centroid[d] - pts[worst][d]);
    const double fr = eval(xr);
    if (fr < vals[best]) {
      for (std::size_t d = 0; d < n; ++d) xe[d] = centroid[d] + 2.0 * (centroid[d] - pts[worst][d]);
      const double fe = eval(xe);
      if (fe < fr) {
        pts[worst] = xe;
        vals[worst] = fe;
      } else {
        pts[worst] = xr;
        vals[worst] = fr;
      }
      continue;
    }
    if (fr < vals[second]) {
      pts[worst] = xr;
      vals[worst] = fr;
      continue;
    }
    const bool outside = fr < vals[worst];
    for (std::size_t d = 0; d < n; ++d) {
      xc[d] = outside ? centroid[d] + 0.5 * (xr[d] - centroid[d]) : centroid[d] + 0.5 * (pts[worst][d] - centroid[d]);
    }
    const double fc = eval(xc);
    if (fc < (outside ? fr : vals[worst])) {
      pts[worst] = xc;
      vals[worst] = fc;
      continue;
    }
    for (std::size_t i = 1; i <= n; ++i) {
      auto& p = pts[idx[i]];
      for (std::size_t d = 0; d < n; ++d) p[d] = pts[best][d] + 0.5 * (p[d] - pts[best][d]);
      vals[idx[i]] = eval(p);
    }
  }
  const std::size_t b = static_cast<std::size_t>(std::min_element(vals.begin(), vals.end()) - vals.begin());
  res.x = pts[b];
  res.value = vals[b];
  return res;
}

}  // namespace heligate
