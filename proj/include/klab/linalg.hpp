#ifndef KLAB_LINALG_HPP
#define KLAB_LINALG_HPP

// Dense symmetric linear algebra for small matrices.
//
// Eigenvalues use closed forms for m = 2 (quadratic formula) and m = 3
// (trigonometric solution of the characteristic cubic); cyclic Jacobi
// handles m >= 4. All tolerances are relative to the Frobenius norm with an
// absolute floor of 1e-300.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <numbers>
#include <span>
#include <string>
#include <vector>

#include "klab/errors.hpp"

namespace klab {

using Vec = std::vector<double>;

inline double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

inline double norm(std::span<const double> a) { return std::sqrt(dot(a, a)); }

/// Dense row-major square matrix used for orthogonal changes of coordinates.
struct DenseMatrix {
  int dim = 0;
  std::vector<double> data;

  DenseMatrix() = default;
  explicit DenseMatrix(int m) : dim(m), data(static_cast<std::size_t>(m) * m, 0.0) {}

  double& operator()(int i, int j) { return data[static_cast<std::size_t>(i) * dim + j]; }
  double operator()(int i, int j) const { return data[static_cast<std::size_t>(i) * dim + j]; }
};

/// Real symmetric matrix in packed upper-triangular storage (row-major over i <= j).
class SymMatrix {
 public:
  SymMatrix() = default;

  explicit SymMatrix(int m) : dim_(m), entries_(packed_size(m), 0.0) {
    if (m < 1) throw Error(ErrorKind::InvalidInput, "SymMatrix dimension must be positive");
  }

  SymMatrix(int m, std::vector<double> packed) : dim_(m), entries_(std::move(packed)) {
    if (m < 1) throw Error(ErrorKind::InvalidInput, "SymMatrix dimension must be positive");
    if (entries_.size() != packed_size(m)) {
      throw Error(ErrorKind::InvalidInput, "packed entry count does not match dimension");
    }
  }

  static constexpr std::size_t packed_size(int m) {
    return static_cast<std::size_t>(m) * (m + 1) / 2;
  }

  static SymMatrix identity(int m) {
    SymMatrix q(m);
    for (int i = 0; i < m; ++i) q(i, i) = 1.0;
    return q;
  }

  static SymMatrix diagonal(std::span<const double> d) {
    SymMatrix q(static_cast<int>(d.size()));
    for (int i = 0; i < q.dim(); ++i) q(i, i) = d[i];
    return q;
  }

  /// Builds from a full row-major matrix; only the upper triangle is read.
  static SymMatrix from_full(int m, std::span<const double> rows) {
    SymMatrix q(m);
    for (int i = 0; i < m; ++i)
      for (int j = i; j < m; ++j) q(i, j) = rows[static_cast<std::size_t>(i) * m + j];
    return q;
  }

  int dim() const noexcept { return dim_; }
  std::span<const double> packed() const noexcept { return entries_; }
  std::span<double> packed() noexcept { return entries_; }

  double& operator()(int i, int j) { return entries_[index(i, j)]; }
  double operator()(int i, int j) const { return entries_[index(i, j)]; }

  double trace() const {
    double t = 0.0;
    for (int i = 0; i < dim_; ++i) t += (*this)(i, i);
    return t;
  }

  double frobenius_norm() const {
    double s = 0.0;
    for (int i = 0; i < dim_; ++i)
      for (int j = i; j < dim_; ++j) {
        const double a = (*this)(i, j);
        s += (i == j ? 1.0 : 2.0) * a * a;
      }
    return std::sqrt(s);
  }

  bool all_finite() const {
    return std::all_of(entries_.begin(), entries_.end(), [](double x) { return std::isfinite(x); });
  }

  /// <x, Q x>
  double quadratic_form(std::span<const double> x) const {
    double s = 0.0;
    for (int i = 0; i < dim_; ++i) {
      s += (*this)(i, i) * x[i] * x[i];
      for (int j = i + 1; j < dim_; ++j) s += 2.0 * (*this)(i, j) * x[i] * x[j];
    }
    return s;
  }

  Vec apply(std::span<const double> x) const {
    Vec y(dim_, 0.0);
    for (int i = 0; i < dim_; ++i)
      for (int j = 0; j < dim_; ++j) y[i] += (*this)(i, j) * x[j];
    return y;
  }

  SymMatrix operator-() const { return scaled(-1.0); }

  SymMatrix scaled(double c) const {
    SymMatrix r = *this;
    for (double& e : r.entries_) e *= c;
    return r;
  }

  /// a*A + b*B
  static SymMatrix combination(double a, const SymMatrix& A, double b, const SymMatrix& B) {
    if (A.dim() != B.dim()) throw Error(ErrorKind::InvalidInput, "dimension mismatch");
    SymMatrix r(A.dim());
    for (std::size_t k = 0; k < r.entries_.size(); ++k)
      r.entries_[k] = a * A.entries_[k] + b * B.entries_[k];
    return r;
  }

  /// U^T Q U for a dense square U of matching dimension.
  SymMatrix conjugated(const DenseMatrix& U) const {
    if (U.dim != dim_) throw Error(ErrorKind::InvalidInput, "dimension mismatch");
    const int m = dim_;
    std::vector<double> qu(static_cast<std::size_t>(m) * m, 0.0);
    for (int i = 0; i < m; ++i)
      for (int k = 0; k < m; ++k) {
        const double qik = (*this)(i, k);
        for (int j = 0; j < m; ++j) qu[static_cast<std::size_t>(i) * m + j] += qik * U(k, j);
      }
    SymMatrix r(m);
    for (int i = 0; i < m; ++i)
      for (int j = i; j < m; ++j) {
        double s = 0.0;
        for (int k = 0; k < m; ++k) s += U(k, i) * qu[static_cast<std::size_t>(k) * m + j];
        r(i, j) = s;
      }
    return r;
  }

  friend bool operator==(const SymMatrix&, const SymMatrix&) = default;

 private:
  std::size_t index(int i, int j) const {
    if (i > j) std::swap(i, j);
    return static_cast<std::size_t>(i) * dim_ - static_cast<std::size_t>(i) * (i - 1) / 2 + (j - i);
  }

  int dim_ = 0;
  std::vector<double> entries_;
};

namespace detail {

inline constexpr int kJacobiMaxSweeps = 50;
inline constexpr double kNormFloor = 1e-300;

inline std::size_t packed_index(int m, int i, int j) {
  return static_cast<std::size_t>(i) * m - static_cast<std::size_t>(i) * (i - 1) / 2 + (j - i);
}

inline void check_finite(std::span<const double> packed) {
  for (double x : packed)
    if (!std::isfinite(x)) throw Error(ErrorKind::InvalidInput, "non-finite matrix entry");
}

inline void eigenvalues_2x2(std::span<const double> p, std::span<double> out) {
  const double a = p[0], b = p[1], c = p[2];
  const double mean = 0.5 * (a + c);
  const double radius = std::hypot(0.5 * (a - c), b);
  out[0] = mean - radius;
  out[1] = mean + radius;
}

inline void eigenvalues_3x3(std::span<const double> p, std::span<double> out) {
  const double a00 = p[0], a01 = p[1], a02 = p[2], a11 = p[3], a12 = p[4], a22 = p[5];
  const double off = a01 * a01 + a02 * a02 + a12 * a12;
  if (off == 0.0) {
    out[0] = a00;
    out[1] = a11;
    out[2] = a22;
    std::sort(out.begin(), out.begin() + 3);
    return;
  }
  const double q = (a00 + a11 + a22) / 3.0;
  const double b00 = a00 - q, b11 = a11 - q, b22 = a22 - q;
  const double p2 = b00 * b00 + b11 * b11 + b22 * b22 + 2.0 * off;
  const double pp = std::sqrt(p2 / 6.0);
  // det((A - qI) / pp) / 2
  const double det = b00 * (b11 * b22 - a12 * a12) - a01 * (a01 * b22 - a12 * a02) +
                     a02 * (a01 * a12 - b11 * a02);
  double r = det / (2.0 * pp * pp * pp);
  r = std::clamp(r, -1.0, 1.0);
  const double phi = std::acos(r) / 3.0;
  const double largest = q + 2.0 * pp * std::cos(phi);
  const double smallest = q + 2.0 * pp * std::cos(phi + 2.0 * std::numbers::pi / 3.0);
  out[0] = smallest;
  out[1] = 3.0 * q - largest - smallest;
  out[2] = largest;
  if (out[1] < out[0]) std::swap(out[0], out[1]);
  if (out[2] < out[1]) std::swap(out[1], out[2]);
}

/// Cyclic Jacobi; destroys `a` (full row-major m x m) and writes the diagonal to `out`.
inline void eigenvalues_jacobi(std::vector<double>& a, int m, double fro, std::span<double> out) {
  auto at = [&](int i, int j) -> double& { return a[static_cast<std::size_t>(i) * m + j]; };
  const double threshold = 1e-12 * std::max(fro, kNormFloor);
  for (int sweep = 0; sweep <= kJacobiMaxSweeps; ++sweep) {
    double off = 0.0;
    for (int i = 0; i < m; ++i)
      for (int j = i + 1; j < m; ++j) off += 2.0 * at(i, j) * at(i, j);
    if (std::sqrt(off) <= threshold) {
      for (int i = 0; i < m; ++i) out[i] = at(i, i);
      std::sort(out.begin(), out.begin() + m);
      return;
    }
    if (sweep == kJacobiMaxSweeps) break;
    for (int p = 0; p < m; ++p)
      for (int q = p + 1; q < m; ++q) {
        const double apq = at(p, q);
        if (apq == 0.0) continue;
        const double theta = (at(q, q) - at(p, p)) / (2.0 * apq);
        const double t = std::copysign(1.0, theta) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        for (int k = 0; k < m; ++k) {
          const double akp = at(k, p), akq = at(k, q);
          at(k, p) = c * akp - s * akq;
          at(k, q) = s * akp + c * akq;
        }
        for (int k = 0; k < m; ++k) {
          const double apk = at(p, k), aqk = at(q, k);
          at(p, k) = c * apk - s * aqk;
          at(q, k) = s * apk + c * aqk;
        }
        at(p, q) = 0.0;
        at(q, p) = 0.0;
      }
  }
  throw Error(ErrorKind::ConvergenceFailure, "Jacobi did not converge in 50 sweeps");
}

/// Ascending eigenvalues of a packed symmetric matrix of dimension m into `out`.
inline void eigenvalues_packed(std::span<const double> p, int m, std::span<double> out) {
  check_finite(p);
  switch (m) {
    case 1: out[0] = p[0]; return;
    case 2: eigenvalues_2x2(p, out); return;
    case 3: eigenvalues_3x3(p, out); return;
    default: break;
  }
  std::vector<double> full(static_cast<std::size_t>(m) * m);
  double fro2 = 0.0;
  for (int i = 0; i < m; ++i)
    for (int j = i; j < m; ++j) {
      const double v = p[packed_index(m, i, j)];
      full[static_cast<std::size_t>(i) * m + j] = v;
      full[static_cast<std::size_t>(j) * m + i] = v;
      fro2 += (i == j ? 1.0 : 2.0) * v * v;
    }
  eigenvalues_jacobi(full, m, std::sqrt(fro2), out);
}

}  // namespace detail

/// Eigenvalues of Q in nondecreasing order.
inline std::vector<double> sym_eigenvalues(const SymMatrix& Q) {
  std::vector<double> out(Q.dim());
  detail::eigenvalues_packed(Q.packed(), Q.dim(), out);
  return out;
}

inline double min_eigenvalue(const SymMatrix& Q) {
  if (Q.dim() <= 3) {
    std::array<double, 3> out{};
    detail::eigenvalues_packed(Q.packed(), Q.dim(), out);
    return out[0];
  }
  return sym_eigenvalues(Q).front();
}

inline double max_eigenvalue(const SymMatrix& Q) {
  if (Q.dim() <= 3) {
    std::array<double, 3> out{};
    detail::eigenvalues_packed(Q.packed(), Q.dim(), out);
    return out[Q.dim() - 1];
  }
  return sym_eigenvalues(Q).back();
}

/// Positive or negative definite.
inline bool is_definite(const SymMatrix& Q) {
  const auto ev = sym_eigenvalues(Q);
  return ev.front() > 0.0 || ev.back() < 0.0;
}

/// Norm of the orthogonal projection of c onto span(u, v), clamped to [0, 1].
///
/// This is the cosine of the angular distance from c to the great circle
/// through u and v. Inputs must be unit vectors; u and v must span a plane.
inline double plane_projection_norm(std::span<const double> u, std::span<const double> v,
                                    std::span<const double> c) {
  constexpr double unit_tol = 2e-12;
  if (std::abs(dot(u, u) - 1.0) > unit_tol || std::abs(dot(v, v) - 1.0) > unit_tol ||
      std::abs(dot(c, c) - 1.0) > unit_tol) {
    throw Error(ErrorKind::InvalidInput, "plane_projection_norm expects unit vectors");
  }
  const double uv = dot(u, v);
  double w2 = 0.0, cw = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    const double wi = v[i] - uv * u[i];
    w2 += wi * wi;
    cw += c[i] * wi;
  }
  if (w2 <= 1e-18) throw DegeneratePairError("points span no plane");
  const double cu = dot(c, u);
  const double proj = std::sqrt(cu * cu + cw * cw / w2);
  return std::min(proj, 1.0);
}

}  // namespace klab

#endif  // KLAB_LINALG_HPP
