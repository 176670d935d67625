#ifndef KLAB_TESTS_ORACLES_HPP
#define KLAB_TESTS_ORACLES_HPP

// Independent reference computations used only by tests. None of these call
// into the code paths they are used to check.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <numbers>
#include <queue>
#include <span>
#include <vector>

#include "klab/graphs.hpp"
#include "klab/linalg.hpp"

namespace klab::oracle {

/// det(Q - lambda I) by Gaussian elimination with partial pivoting.
inline double char_poly(const SymMatrix& Q, double lambda) {
  const int m = Q.dim();
  std::vector<double> a(static_cast<std::size_t>(m) * m);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j) a[i * m + j] = Q(i, j) - (i == j ? lambda : 0.0);
  double det = 1.0;
  for (int k = 0; k < m; ++k) {
    int piv = k;
    for (int i = k + 1; i < m; ++i)
      if (std::abs(a[i * m + k]) > std::abs(a[piv * m + k])) piv = i;
    if (a[piv * m + k] == 0.0) return 0.0;
    if (piv != k) {
      for (int j = 0; j < m; ++j) std::swap(a[k * m + j], a[piv * m + j]);
      det = -det;
    }
    det *= a[k * m + k];
    for (int i = k + 1; i < m; ++i) {
      const double f = a[i * m + k] / a[k * m + k];
      for (int j = k; j < m; ++j) a[i * m + j] -= f * a[k * m + j];
    }
  }
  return det;
}

/// Eigenvalues as sign changes of det(Q - lambda I) on a fine grid, refined by bisection.
inline std::vector<double> eigenvalues_by_bisection(const SymMatrix& Q, int grid = 200000) {
  double bound = 0.0;  // Gershgorin
  for (int i = 0; i < Q.dim(); ++i) {
    double r = 0.0;
    for (int j = 0; j < Q.dim(); ++j) r += std::abs(Q(i, j));
    bound = std::max(bound, r);
  }
  bound = bound * 1.01 + 1e-12;
  std::vector<double> roots;
  double prev_x = -bound, prev_f = char_poly(Q, prev_x);
  for (int k = 1; k <= grid; ++k) {
    const double x = -bound + 2.0 * bound * k / grid;
    const double f = char_poly(Q, x);
    if (f == 0.0) {
      roots.push_back(x);
    } else if ((prev_f < 0.0) != (f < 0.0) && prev_f != 0.0) {
      double lo = prev_x, hi = x, flo = prev_f;
      for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        const double fm = char_poly(Q, mid);
        if ((fm < 0.0) == (flo < 0.0)) lo = mid, flo = fm;
        else hi = mid;
      }
      roots.push_back(0.5 * (lo + hi));
    }
    prev_x = x;
    prev_f = f;
  }
  return roots;
}

/// max over a theta-grid of |<c, cos t u' + sin t v'>| with (u', v') an
/// orthonormal basis of span(u, v).
inline double great_circle_max_alignment(std::span<const double> u, std::span<const double> v,
                                         std::span<const double> c, int grid = 100000) {
  const std::size_t n = u.size();
  std::vector<double> e1(u.begin(), u.end()), e2(v.begin(), v.end());
  double n1 = 0.0;
  for (double x : e1) n1 += x * x;
  n1 = std::sqrt(n1);
  for (double& x : e1) x /= n1;
  double p = 0.0;
  for (std::size_t i = 0; i < n; ++i) p += e1[i] * e2[i];
  for (std::size_t i = 0; i < n; ++i) e2[i] -= p * e1[i];
  double n2 = 0.0;
  for (double x : e2) n2 += x * x;
  n2 = std::sqrt(n2);
  for (double& x : e2) x /= n2;
  double a = 0.0, b = 0.0;
  for (std::size_t i = 0; i < n; ++i) a += c[i] * e1[i], b += c[i] * e2[i];
  double best = 0.0;
  for (int k = 0; k < grid; ++k) {
    const double t = std::numbers::pi * k / grid;
    best = std::max(best, std::abs(a * std::cos(t) + b * std::sin(t)));
  }
  return best;
}

/// Minimum angular distance from +-c to the great circle through u and v, on a grid.
inline double great_circle_distance(std::span<const double> u, std::span<const double> v,
                                    std::span<const double> c, int grid = 100000) {
  return std::acos(std::min(1.0, great_circle_max_alignment(u, v, c, grid)));
}

/// Components by breadth-first search over the adjacency bits.
template <typename Point>
std::size_t bfs_components(const ObstacleGraph<Point>& g) {
  const std::size_t s = g.size();
  std::vector<char> seen(s, 0);
  std::size_t comps = 0;
  for (std::size_t start = 0; start < s; ++start) {
    if (seen[start]) continue;
    ++comps;
    std::queue<std::size_t> q;
    q.push(start);
    seen[start] = 1;
    while (!q.empty()) {
      const std::size_t v = q.front();
      q.pop();
      for (std::size_t w = 0; w < s; ++w)
        if (!seen[w] && g.has_edge(v, w)) seen[w] = 1, q.push(w);
    }
  }
  return comps;
}

/// Distinct real roots of sum c_k x^k on [-1e6, 1e6]: sign changes on an
/// asinh-spaced grid refined by bisection to 1e-10 relative width.
inline std::vector<double> real_roots_by_bisection(std::span<const double> c, int grid = 400000) {
  auto p = [&](double x) {
    double s = 0.0;
    for (std::size_t k = c.size(); k-- > 0;) s = s * x + c[k];
    return s;
  };
  const double tmax = std::asinh(1e6);
  std::vector<double> roots;
  double prev_x = -1e6, prev_f = p(prev_x);
  for (int k = 1; k <= grid; ++k) {
    const double x = std::sinh(-tmax + 2.0 * tmax * k / grid);
    const double f = p(x);
    if ((prev_f < 0.0) != (f < 0.0)) {
      double lo = prev_x, hi = x, flo = prev_f;
      while (hi - lo > 1e-10 * (1.0 + std::abs(lo))) {
        const double mid = 0.5 * (lo + hi);
        const double fm = p(mid);
        if ((fm < 0.0) == (flo < 0.0)) lo = mid, flo = fm;
        else hi = mid;
      }
      roots.push_back(0.5 * (lo + hi));
    }
    prev_x = x;
    prev_f = f;
  }
  return roots;
}

/// Two-sample Kolmogorov-Smirnov statistic.
inline double ks_statistic(std::vector<double> a, std::vector<double> b) {
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  std::size_t i = 0, j = 0;
  double d = 0.0;
  while (i < a.size() && j < b.size()) {
    const double x = std::min(a[i], b[j]);
    while (i < a.size() && a[i] <= x) ++i;
    while (j < b.size() && b[j] <= x) ++j;
    d = std::max(d, std::abs(static_cast<double>(i) / a.size() - static_cast<double>(j) / b.size()));
  }
  return d;
}

/// 1% critical value of the two-sample KS statistic (asymptotic).
inline double ks_critical_1pct(std::size_t n, std::size_t m) {
  return 1.628 * std::sqrt(static_cast<double>(n + m) / static_cast<double>(n * m));
}

/// Sample mean and (n-1) variance by two passes.
inline std::pair<double, double> two_pass_mean_variance(std::span<const double> xs) {
  double mean = 0.0;
  for (double x : xs) mean += x;
  mean /= static_cast<double>(xs.size());
  double ss = 0.0;
  for (double x : xs) ss += (x - mean) * (x - mean);
  return {mean, xs.size() > 1 ? ss / static_cast<double>(xs.size() - 1) : 0.0};
}

}  // namespace klab::oracle

#endif  // KLAB_TESTS_ORACLES_HPP
