#ifndef KLAB_GEOMETRY_HPP
#define KLAB_GEOMETRY_HPP

// Convex obstacles in real projective space RP^N.
//
// Projective points are unit vectors of R^(N+1); every test here is invariant
// under x -> -x, so callers never need to canonicalize signs. A projective
// line through p and q is the great circle spanned by p and q.

#include <algorithm>
#include <cmath>
#include <concepts>
#include <cstddef>
#include <numbers>
#include <utility>
#include <vector>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "klab/errors.hpp"
#include "klab/linalg.hpp"
#include "klab/pencil.hpp"
#include "klab/sampling.hpp"

namespace klab {

// clang-format off
template <typename O>
concept Obstacle = requires(const O& o, const typename O::Point& p, double eps, Rng& rng) {
  typename O::Point;
  { o.ambient_dim() } -> std::convertible_to<int>;
  { o.contains(p) } -> std::same_as<bool>;
  { o.contains_eps(p, eps) } -> std::same_as<bool>;
  { o.hit_by_line(p, p) } -> std::same_as<bool>;
  { o.sample_uniform(rng) } -> std::same_as<typename O::Point>;
};
// clang-format on

/// Angular distance between the projective points [a] and [b], in [0, pi/2].
inline double projective_distance(std::span<const double> a, std::span<const double> b) {
  return std::acos(std::min(1.0, std::abs(dot(a, b))));
}

/// vol(cap of angular radius rho) / vol(RP^N), by Gauss-Kronrod quadrature of
/// sin^(N-1) over [0, rho] relative to [0, pi/2].
inline double cap_volume_fraction(int N, double rho) {
  if (N < 1) throw Error(ErrorKind::InvalidInput, "ambient dimension must be >= 1");
  if (!(rho > 0.0 && rho <= std::numbers::pi / 2)) {
    throw Error(ErrorKind::InvalidInput, "cap radius must lie in (0, pi/2]");
  }
  if (N == 1) return rho / (std::numbers::pi / 2);
  using boost::math::quadrature::gauss_kronrod;
  auto integrand = [N](double t) { return std::pow(std::sin(t), N - 1); };
  const double part = gauss_kronrod<double, 61>::integrate(integrand, 0.0, rho, 15, 1e-14);
  const double whole = gauss_kronrod<double, 61>::integrate(integrand, 0.0, std::numbers::pi / 2, 15, 1e-14);
  return part / whole;
}

/// Inverse of cap_volume_fraction in rho, by bisection.
inline double cap_radius_for_fraction(int N, double fraction) {
  if (!(fraction > 0.0 && fraction < 1.0)) {
    throw Error(ErrorKind::InvalidInput, "fraction must lie in (0, 1)");
  }
  double lo = 0.0, hi = std::numbers::pi / 2;
  for (int it = 0; it < 200 && hi - lo > 1e-15; ++it) {
    const double mid = 0.5 * (lo + hi);
    (cap_volume_fraction(N, mid) < fraction ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

/// Projective double cap {x : |<x, c>| >= cos rho}, rho < pi/2.
class CapObstacle {
 public:
  using Point = Vec;

  /// Line tests within this band of cos(rho) resolve to "hit".
  static constexpr double kBorderline = 1e-9;

  CapObstacle(Vec center, double rho) : center_(std::move(center)), rho_(rho) {
    if (center_.size() < 2) throw Error(ErrorKind::InvalidInput, "cap center needs N >= 1");
    if (!(rho > 0.0 && rho < std::numbers::pi / 2)) {
      throw Error(ErrorKind::InvalidInput, "cap radius must lie in (0, pi/2)");
    }
    const double n = norm(center_);
    if (!(n > 0.0) || !std::isfinite(n)) throw Error(ErrorKind::InvalidInput, "cap center is zero");
    for (double& x : center_) x /= n;
    cos_rho_ = std::cos(rho_);
  }

  int ambient_dim() const noexcept { return static_cast<int>(center_.size()) - 1; }
  const Vec& center() const noexcept { return center_; }
  double radius() const noexcept { return rho_; }

  bool contains(const Point& q) const { return std::abs(dot(q, center_)) >= cos_rho_; }

  bool contains_eps(const Point& q, double eps) const {
    const double r = std::min(rho_ + std::max(eps, 0.0), std::numbers::pi / 2 - 1e-9);
    return std::abs(dot(q, center_)) >= std::cos(r);
  }

  /// True iff the great circle through p and q comes within rho of +-c.
  bool hit_by_line(const Point& p, const Point& q) const {
    return plane_projection_norm(p, q, center_) >= cos_rho_ - kBorderline;
  }

  double volume_fraction() const { return cap_volume_fraction(ambient_dim(), rho_); }

  double dilated_volume_fraction(double eps) const {
    return cap_volume_fraction(ambient_dim(),
                               std::min(rho_ + std::max(eps, 0.0), std::numbers::pi / 2 - 1e-9));
  }

  Point sample_uniform(Rng& rng) const { return sample_sphere_point(rng, ambient_dim()); }

 private:
  Vec center_;
  double rho_;
  double cos_rho_;
};

/// Projectivized cone of definite m x m matrices inside RP^N, N = m(m+1)/2 - 1.
/// Membership is definiteness since [Q] = [-Q].
class PsdConeObstacle {
 public:
  using Point = SymMatrix;

  explicit PsdConeObstacle(int m) : m_(m) {
    if (m < 3) {
      throw Error(ErrorKind::UnsupportedDimension,
                  "PSD-cone obstacle needs m >= 3 for the pencil line test");
    }
  }

  int matrix_dim() const noexcept { return m_; }
  int ambient_dim() const noexcept { return m_ * (m_ + 1) / 2 - 1; }

  bool contains(const Point& Q) const { return is_definite(Q); }

  /// Only eps = 0 is supported; the dilated cone has no closed form here.
  bool contains_eps(const Point& Q, double eps) const {
    if (eps != 0.0) {
      throw Error(ErrorKind::InvalidInput, "eps-dilation of the PSD cone is not available");
    }
    return contains(Q);
  }

  /// True unless the pencil is certified free of definite members.
  bool hit_by_line(const Point& Q1, const Point& Q2) const {
    return pencil_contains_definite(Q1, Q2).outcome != PencilOutcome::NoDefinite;
  }

  /// Uniform point of RP^N for the Frobenius metric: a normalized GOE matrix.
  Point sample_uniform(Rng& rng) const {
    SymMatrix Q = sample_goe(rng, m_);
    return Q.scaled(1.0 / Q.frobenius_norm());
  }

 private:
  int m_;
};

struct FractionEstimate {
  double fraction = 0.0;
  double standard_error = 0.0;
  std::size_t samples = 0;
};

/// Monte Carlo estimate of vol(good cone of p) / vol(RP^N): the share of
/// uniform points x whose line through p misses the obstacle.
template <Obstacle O>
FractionEstimate good_cone_fraction(const O& obst, const typename O::Point& p, std::size_t samples,
                                    Rng& rng) {
  if (obst.contains(p)) {
    throw Error(ErrorKind::PreconditionViolation, "good cone of a point inside the obstacle");
  }
  if (samples == 0) throw Error(ErrorKind::InvalidInput, "samples must be positive");
  std::size_t good = 0;
  for (std::size_t k = 0; k < samples;) {
    const auto x = obst.sample_uniform(rng);
    try {
      if (!obst.hit_by_line(p, x)) ++good;
    } catch (const DegeneratePairError&) {
      continue;  // measure zero; redraw
    }
    ++k;
  }
  FractionEstimate est;
  est.samples = samples;
  est.fraction = static_cast<double>(good) / static_cast<double>(samples);
  est.standard_error = std::sqrt(est.fraction * (1.0 - est.fraction) / static_cast<double>(samples));
  return est;
}

struct CoverageResult {
  std::size_t draws = 0;
  bool timeout = false;
};

/// Draws points outside the eps-dilated obstacle until every point of a fixed
/// uniform test set (also outside the dilation) lies in the good cone of some
/// draw. Coverage is certified on the test set only.
template <Obstacle O>
CoverageResult coverage_count(const O& obst, double eps, std::size_t test_grid_size,
                              std::size_t max_draws, Rng& rng) {
  auto draw_outside = [&]() {
    for (;;) {
      auto x = obst.sample_uniform(rng);
      if (!obst.contains_eps(x, eps)) return x;
    }
  };
  std::vector<typename O::Point> tests;
  tests.reserve(test_grid_size);
  for (std::size_t k = 0; k < test_grid_size; ++k) tests.push_back(draw_outside());

  CoverageResult result;
  std::vector<char> covered(tests.size(), 0);
  std::size_t remaining = tests.size();
  while (remaining > 0) {
    if (result.draws >= max_draws) {
      result.timeout = true;
      return result;
    }
    const auto q = draw_outside();
    ++result.draws;
    for (std::size_t k = 0; k < tests.size(); ++k) {
      if (covered[k]) continue;
      try {
        if (!obst.hit_by_line(q, tests[k])) {
          covered[k] = 1;
          --remaining;
        }
      } catch (const DegeneratePairError&) {
      }
    }
  }
  return result;
}

}  // namespace klab

#endif  // KLAB_GEOMETRY_HPP
