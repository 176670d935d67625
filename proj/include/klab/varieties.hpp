#ifndef KLAB_VARIETIES_HPP
#define KLAB_VARIETIES_HPP

// Real zero counting: binary forms on RP^1, arrangements of binary forms,
// pairs of conics in RP^2, and the expected-count leading term.
//
// Counts are projective. The spherical arrangement double covers the
// projective one, so spherical counts are twice these values.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <vector>

#include <Eigen/Dense>

#include "klab/errors.hpp"
#include "klab/linalg.hpp"
#include "klab/sampling.hpp"

namespace klab {

struct ZeroCount {
  int count = 0;
  bool degenerate = false;
};

namespace detail {

/// Parlett-Reinsch balancing with powers of two, in place.
inline void balance(Eigen::MatrixXd& A) {
  const Eigen::Index n = A.rows();
  constexpr double radix = 2.0;
  bool done = false;
  while (!done) {
    done = true;
    for (Eigen::Index i = 0; i < n; ++i) {
      double c = A.col(i).cwiseAbs().sum() - std::abs(A(i, i));
      const double r = A.row(i).cwiseAbs().sum() - std::abs(A(i, i));
      if (c == 0.0 || r == 0.0) continue;
      const double s = c + r;
      double f = 1.0;
      while (c < r / radix) {
        f *= radix;
        c *= radix * radix;
      }
      while (c > r * radix) {
        f /= radix;
        c /= radix * radix;
      }
      if ((c + r) / f < 0.95 * s) {
        done = false;
        A.row(i) /= f;
        A.col(i) *= f;
      }
    }
  }
}

/// Strips leading coefficients below rel * max|c|; returns the remaining degree.
inline int effective_degree(std::span<const double> coeffs, double rel) {
  double big = 0.0;
  for (double c : coeffs) big = std::max(big, std::abs(c));
  if (big == 0.0) return -1;
  int deg = static_cast<int>(coeffs.size()) - 1;
  while (deg > 0 && std::abs(coeffs[deg]) < rel * big) --deg;
  return deg;
}

struct ComplexRoot {
  double re;
  double im;
};

inline std::vector<ComplexRoot> all_roots(std::span<const double> coeffs, int deg) {
  std::vector<ComplexRoot> roots;
  if (deg == 1) {
    roots.push_back({-coeffs[0] / coeffs[1], 0.0});
    return roots;
  }
  Eigen::MatrixXd C = Eigen::MatrixXd::Zero(deg, deg);
  for (int i = 1; i < deg; ++i) C(i, i - 1) = 1.0;
  for (int i = 0; i < deg; ++i) C(i, deg - 1) = -coeffs[i] / coeffs[deg];
  balance(C);
  Eigen::EigenSolver<Eigen::MatrixXd> solver;
  solver.setMaxIterations(100 * deg);
  solver.compute(C, false);
  if (solver.info() != Eigen::Success) {
    throw Error(ErrorKind::ConvergenceFailure, "companion QR did not converge");
  }
  const auto& ev = solver.eigenvalues();
  roots.reserve(deg);
  for (Eigen::Index i = 0; i < ev.size(); ++i) roots.push_back({ev[i].real(), ev[i].imag()});
  return roots;
}

}  // namespace detail

/// Distinct real roots, ascending, of sum_k coeffs[k] x^k.
///
/// Roots are eigenvalues of the balanced companion matrix. A root is real when
/// |Im| <= 1e-7 (1 + |Re|); real roots closer than 1e-8 (1 + |Re|) are merged.
inline std::vector<double> univariate_real_roots(std::span<const double> coeffs) {
  for (double c : coeffs)
    if (!std::isfinite(c)) throw Error(ErrorKind::InvalidInput, "non-finite coefficient");
  const int deg = detail::effective_degree(coeffs, 1e-12);
  if (deg < 0) throw Error(ErrorKind::InvalidInput, "zero polynomial");
  if (deg == 0) throw Error(ErrorKind::InvalidInput, "constant polynomial has no degree");
  std::vector<double> real;
  for (const auto& r : detail::all_roots(coeffs, deg))
    if (std::abs(r.im) <= 1e-7 * (1.0 + std::abs(r.re))) real.push_back(r.re);
  std::sort(real.begin(), real.end());
  std::vector<double> merged;
  for (double r : real) {
    if (!merged.empty() && r - merged.back() <= 1e-8 * (1.0 + std::abs(r))) continue;
    merged.push_back(r);
  }
  return merged;
}

/// A projective zero [x0 : x1] of a binary form as a unit vector with x1 >= 0.
struct ProjectivePoint1 {
  double x0;
  double x1;
};

namespace detail {

struct BinaryZeros {
  std::vector<ProjectivePoint1> points;
  bool degenerate = false;
};

/// Projective zeros of sum_k c_k x0^k x1^(d-k).
inline BinaryZeros binary_form_zeros(std::span<const double> coeffs) {
  const int d = static_cast<int>(coeffs.size()) - 1;
  double n2 = 0.0;
  for (double c : coeffs) n2 += c * c;
  const double fnorm = std::sqrt(n2);
  if (!(fnorm > 0.0)) throw Error(ErrorKind::InvalidInput, "zero binary form");
  BinaryZeros out;
  const double threshold = 1e-12 * fnorm;
  const double lead = std::abs(coeffs[d]);
  const bool at_infinity = lead <= threshold;
  if (lead >= 0.1 * threshold && lead <= 10.0 * threshold) out.degenerate = true;
  int top = d;
  if (at_infinity) {
    out.points.push_back({1.0, 0.0});
    while (top > 0 && std::abs(coeffs[top]) <= threshold) --top;
  }
  const auto finite = coeffs.subspan(0, static_cast<std::size_t>(top) + 1);
  if (effective_degree(finite, 1e-12) >= 1) {
    for (double r : univariate_real_roots(finite)) {
      const double h = std::hypot(r, 1.0);
      out.points.push_back({r / h, 1.0 / h});
    }
  }
  return out;
}

}  // namespace detail

/// Number of zeros of f on RP^1: real roots of f(x, 1) plus the point [1:0]
/// when the x0^d coefficient vanishes relative to |f|.
inline ZeroCount projective_zero_count_rp1(const BinaryForm& f) {
  if (f.degree < 1 || f.coeffs.size() != static_cast<std::size_t>(f.degree) + 1) {
    throw Error(ErrorKind::InvalidInput, "malformed binary form");
  }
  const auto zeros = detail::binary_form_zeros(f.coeffs);
  return {static_cast<int>(zeros.points.size()), zeros.degenerate};
}

struct ArrangementCount {
  int b0 = 1;
  int points = 0;  ///< distinct zeros of the union
  bool degenerate = false;
};

/// Number of arcs RP^1 is cut into by the union of the zero sets of `forms`.
inline ArrangementCount arrangement_b0_rp1(std::span<const BinaryForm> forms) {
  std::vector<double> angles;
  ArrangementCount result;
  for (const auto& f : forms) {
    const auto zeros = detail::binary_form_zeros(f.coeffs);
    result.degenerate = result.degenerate || zeros.degenerate;
    for (const auto& p : zeros.points) {
      double a = std::atan2(p.x1, p.x0);
      if (a < 0.0) a += std::numbers::pi;
      if (a >= std::numbers::pi) a -= std::numbers::pi;
      angles.push_back(a);
    }
  }
  std::sort(angles.begin(), angles.end());
  constexpr double tol = 1e-8;
  int distinct = 0;
  for (std::size_t k = 0; k < angles.size(); ++k)
    if (k == 0 || angles[k] - angles[k - 1] > tol) ++distinct;
  // RP^1 is a circle of length pi
  if (distinct > 1 && angles.front() + std::numbers::pi - angles.back() <= tol) --distinct;
  result.points = distinct;
  result.b0 = std::max(distinct, 1);
  return result;
}

namespace detail {

using Form = std::vector<double>;  // c[k] multiplies y^k z^(deg - k)

inline Form form_mul(const Form& a, const Form& b) {
  Form r(a.size() + b.size() - 1, 0.0);
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < b.size(); ++j) r[i + j] += a[i] * b[j];
  return r;
}

inline Form form_axpy(double alpha, const Form& a, double beta, const Form& b) {
  Form r(std::max(a.size(), b.size()), 0.0);
  for (std::size_t i = 0; i < a.size(); ++i) r[i] += alpha * a[i];
  for (std::size_t i = 0; i < b.size(); ++i) r[i] += beta * b[i];
  return r;
}

/// Counts real common zeros of two ternary quadrics, assuming both have a
/// usable x^2 coefficient.
inline ZeroCount count_conic_points(const SymMatrix& Q1, const SymMatrix& Q2) {
  const double a1 = Q1(0, 0), a2 = Q2(0, 0);
  const Form b1{2.0 * Q1(0, 2), 2.0 * Q1(0, 1)}, b2{2.0 * Q2(0, 2), 2.0 * Q2(0, 1)};
  const Form c1{Q1(2, 2), 2.0 * Q1(1, 2), Q1(1, 1)}, c2{Q2(2, 2), 2.0 * Q2(1, 2), Q2(1, 1)};
  // Sylvester resultant in x: (a1 c2 - a2 c1)^2 - (a1 b2 - a2 b1)(b1 c2 - b2 c1)
  const Form ac = form_axpy(a1, c2, -a2, c1);
  const Form ab = form_axpy(a1, b2, -a2, b1);
  const Form bc = form_axpy(1.0, form_mul(b1, c2), -1.0, form_mul(b2, c1));
  const Form res = form_axpy(1.0, form_mul(ac, ac), -1.0, form_mul(ab, bc));

  ZeroCount out;
  double rnorm = 0.0;
  for (double c : res) rnorm += c * c;
  const double scale1 = Q1.frobenius_norm(), scale2 = Q2.frobenius_norm();
  const double ref = std::pow(std::max(scale1, scale2), 4);
  if (std::sqrt(rnorm) <= 1e-12 * ref) {
    out.degenerate = true;  // common component
    return out;
  }
  const auto yz = binary_form_zeros(res);
  out.degenerate = yz.degenerate;

  std::vector<Vec> points;
  auto consider = [&](double x, double y, double z) {
    Vec p{x, y, z};
    const double h = norm(p);
    for (double& t : p) t /= h;
    const double r1 = std::abs(Q1.quadratic_form(p)) / scale1;
    const double r2 = std::abs(Q2.quadratic_form(p)) / scale2;
    const double r = std::max(r1, r2);
    if (r > 1e-6) {
      if (r <= 1e-4) out.degenerate = true;
      return;
    }
    for (const auto& q : points)
      if (std::abs(dot(p, q)) >= std::cos(1e-6)) return;
    points.push_back(std::move(p));
  };
  for (const auto& pt : yz.points) {
    const double y = pt.x0, z = pt.x1;
    const double B1 = b1[1] * y + b1[0] * z, B2 = b2[1] * y + b2[0] * z;
    const double C1 = c1[2] * y * y + c1[1] * y * z + c1[0] * z * z;
    const double C2 = c2[2] * y * y + c2[1] * y * z + c2[0] * z * z;
    const double denom = a2 * B1 - a1 * B2;
    if (std::abs(denom) > 1e-12 * (std::abs(a1 * C2) + std::abs(a2 * C1) + 1e-300)) {
      consider((a1 * C2 - a2 * C1) / denom, y, z);
    }
    const double disc = B1 * B1 - 4.0 * a1 * C1;
    if (disc >= 0.0) {
      const double sq = std::sqrt(disc);
      const double qq = -0.5 * (B1 + std::copysign(sq, B1));
      if (qq != 0.0) {
        consider(qq / a1, y, z);
        consider(C1 / qq, y, z);
      } else {
        consider(0.0, y, z);
      }
    }
  }
  out.count = static_cast<int>(points.size());
  if (out.count % 2 != 0 || out.count > 4) out.degenerate = true;
  return out;
}

}  // namespace detail

/// Number of real common zeros in RP^2 of two ternary quadrics.
///
/// Eliminates x with the Sylvester resultant, counts the projective roots of
/// the resulting binary quartic in (y, z) and back-substitutes. When either x^2
/// coefficient is tiny the pair is rotated by a fixed-seed random orthogonal
/// change of coordinates (at most 5 times).
inline ZeroCount conic_intersection_count(const SymMatrix& Q1, const SymMatrix& Q2) {
  if (Q1.dim() != 3 || Q2.dim() != 3) throw Error(ErrorKind::InvalidInput, "conics must be 3x3");
  const double n1 = Q1.frobenius_norm(), n2 = Q2.frobenius_norm();
  if (!(n1 > 0.0) || !(n2 > 0.0)) throw Error(ErrorKind::InvalidInput, "zero conic");
  {
    double plus = 0.0, minus = 0.0;
    const auto p1 = Q1.packed(), p2 = Q2.packed();
    for (std::size_t k = 0; k < p1.size(); ++k) {
      const double w = (k == 0 || k == 3 || k == 5) ? 1.0 : 2.0;
      const double u = p1[k] / n1, v = p2[k] / n2;
      plus += w * (u - v) * (u - v);
      minus += w * (u + v) * (u + v);
    }
    if (std::min(plus, minus) <= 1e-24) {
      throw Error(ErrorKind::DegeneratePencil, "conics are proportional");
    }
  }
  const double scale = std::max(n1, n2);
  SymMatrix A = Q1, B = Q2;
  Rng rng(0x5EED'C0'1C5ULL);
  for (int attempt = 0; attempt <= 5; ++attempt) {
    if (std::abs(A(0, 0)) >= 1e-9 * scale && std::abs(B(0, 0)) >= 1e-9 * scale) {
      ZeroCount zc = detail::count_conic_points(A, B);
      if (attempt == 5) zc.degenerate = true;
      return zc;
    }
    if (attempt == 5) break;
    const DenseMatrix U = random_orthogonal(rng, 3);
    A = Q1.conjugated(U);
    B = Q2.conjugated(U);
  }
  return {0, true};
}

/// Leading term of the expected number of components of RP^n minus an
/// arrangement of hypersurfaces of the given degrees: the sum over n-subsets
/// I of sqrt(prod_{i in I} d_i). Spherical normalization is twice this.
inline double ekss_leading_term(std::span<const int> degrees, int n) {
  if (n < 1 || degrees.size() < static_cast<std::size_t>(n)) {
    throw Error(ErrorKind::InvalidInput, "need at least n >= 1 degrees");
  }
  // elementary symmetric polynomial e_n of sqrt(d_i)
  std::vector<double> e(static_cast<std::size_t>(n) + 1, 0.0);
  e[0] = 1.0;
  for (int d : degrees) {
    if (d < 1) throw Error(ErrorKind::InvalidInput, "degrees must be positive");
    const double r = std::sqrt(static_cast<double>(d));
    for (int k = n; k >= 1; --k) e[k] += r * e[k - 1];
  }
  return e[n];
}

}  // namespace klab

#endif  // KLAB_VARIETIES_HPP
