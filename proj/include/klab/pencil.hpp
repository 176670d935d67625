#ifndef KLAB_PENCIL_HPP
#define KLAB_PENCIL_HPP

// Definiteness of a pencil of quadrics {cos t * Q1 + sin t * Q2}.
//
// Two quadrics in at least three variables share a real projective zero
// exactly when no member of their pencil is definite (Calabi). The pencil
// test maximizes the smallest eigenvalue along four chords between +-Q1 and
// +-Q2; lambda_min is concave on each chord, so golden-section search finds
// the chord maximum. The common-zero oracle attacks the other side of the
// equivalence by minimizing q1^2 + q2^2 on the unit sphere.

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <optional>
#include <vector>

#include "klab/errors.hpp"
#include "klab/linalg.hpp"
#include "klab/sampling.hpp"

namespace klab {

enum class PencilOutcome { ContainsDefinite, NoDefinite, Borderline };

inline const char* to_string(PencilOutcome o) {
  switch (o) {
    case PencilOutcome::ContainsDefinite: return "ContainsDefinite";
    case PencilOutcome::NoDefinite: return "NoDefinite";
    case PencilOutcome::Borderline: return "Borderline";
  }
  return "Unknown";
}

struct PencilVerdict {
  PencilOutcome outcome = PencilOutcome::Borderline;
  /// Pencil angle of the best member found: cos(theta) Q1 + sin(theta) Q2 (up to scale).
  double theta = 0.0;
  /// lambda_min at the best chord point: the witness value for ContainsDefinite,
  /// otherwise the largest value seen.
  double value = -std::numeric_limits<double>::infinity();
  int iterations = 0;
  /// Best value within tol of zero. Set for Borderline and for tangent NoDefinite pairs.
  bool borderline = false;
};

struct PencilOptions {
  /// Decision band; <= 0 selects 1e-9 * max(|Q1|_F, |Q2|_F).
  double tol = 0.0;
  double interval_tol = 1e-10;
  int max_iterations = 200;
};

namespace detail {

/// Upper bound on the maximum over [a, b] of a concave function sampled at
/// a < c < d < b.
inline double concave_upper_bound(double a, double fa, double c, double fc, double d, double fd,
                                  double b, double fb) {
  const double slope_cd = (fd - fc) / (d - c);
  double bound = std::max({fc, fd, fc + slope_cd * (a - c), fd + slope_cd * (b - d)});
  // inside [c, d]: below the extensions of the outer secants
  const double slope_ac = (fc - fa) / (c - a);
  const double slope_db = (fb - fd) / (b - d);
  auto left = [&](double x) { return fc + slope_ac * (x - c); };
  auto right = [&](double x) { return fd + slope_db * (x - d); };
  double inner = std::max(std::min(left(c), right(c)), std::min(left(d), right(d)));
  if (slope_ac != slope_db) {
    const double x = (fd - fc + slope_ac * c - slope_db * d) / (slope_ac - slope_db);
    if (x > c && x < d) inner = std::max(inner, std::min(left(x), right(x)));
  }
  return std::max(bound, inner);
}

class PencilEvaluator {
 public:
  PencilEvaluator(const SymMatrix& Q1, const SymMatrix& Q2)
      : m_(Q1.dim()), p1_(Q1.packed()), p2_(Q2.packed()), buf_(p1_.size()), ev_(m_) {}

  /// lambda_min(a * Q1 + b * Q2)
  double min_eig(double a, double b) {
    for (std::size_t k = 0; k < buf_.size(); ++k) buf_[k] = a * p1_[k] + b * p2_[k];
    eigenvalues_packed(buf_, m_, ev_);
    return ev_[0];
  }

 private:
  int m_;
  std::span<const double> p1_, p2_;
  std::vector<double> buf_;
  std::vector<double> ev_;
};

}  // namespace detail

/// Decides whether the pencil spanned by Q1 and Q2 contains a definite matrix.
inline PencilVerdict pencil_contains_definite(const SymMatrix& Q1, const SymMatrix& Q2,
                                              const PencilOptions& opts = {}) {
  if (Q1.dim() != Q2.dim()) throw Error(ErrorKind::InvalidInput, "pencil dimension mismatch");
  if (Q1.dim() < 3) {
    throw Error(ErrorKind::UnsupportedDimension,
                "pencil criterion needs at least three variables");
  }
  const double n1 = Q1.frobenius_norm(), n2 = Q2.frobenius_norm();
  if (!(n1 > 0.0) || !(n2 > 0.0)) throw Error(ErrorKind::InvalidInput, "zero matrix in pencil");
  const double tol = opts.tol > 0.0 ? opts.tol : 1e-9 * std::max(n1, n2);

  detail::PencilEvaluator eval(Q1, Q2);
  const auto ev1 = sym_eigenvalues(Q1);
  const auto ev2 = sym_eigenvalues(Q2);
  // lambda_min(+Q) and lambda_min(-Q)
  const std::array<double, 2> end1{ev1.front(), -ev1.back()};
  const std::array<double, 2> end2{ev2.front(), -ev2.back()};

  PencilVerdict verdict;
  verdict.iterations = 2;
  auto consider = [&](double value, double a, double b) {
    if (value > verdict.value) {
      verdict.value = value;
      verdict.theta = std::atan2(b, a);
    }
    return value > tol;
  };
  auto found = [&]() {
    verdict.outcome = PencilOutcome::ContainsDefinite;
    return verdict;
  };

  for (int s1 = 0; s1 < 2; ++s1)
    if (consider(end1[s1], s1 == 0 ? 1.0 : -1.0, 0.0)) return found();
  for (int s2 = 0; s2 < 2; ++s2)
    if (consider(end2[s2], 0.0, s2 == 0 ? 1.0 : -1.0)) return found();

  constexpr double ratio = 0.6180339887498949;
  for (int s1 = 0; s1 < 2; ++s1) {
    for (int s2 = 0; s2 < 2; ++s2) {
      const double sa = s1 == 0 ? 1.0 : -1.0;
      const double sb = s2 == 0 ? 1.0 : -1.0;
      // M(t) = (1 - t) sa Q1 + t sb Q2
      auto f = [&](double t) {
        ++verdict.iterations;
        return eval.min_eig((1.0 - t) * sa, t * sb);
      };
      double a = 0.0, b = 1.0, fa = end1[s1], fb = end2[s2];
      double c = b - ratio * (b - a), d = a + ratio * (b - a);
      double fc = f(c), fd = f(d);
      if (consider(fc, (1.0 - c) * sa, c * sb) || consider(fd, (1.0 - d) * sa, d * sb)) return found();
      for (int it = 0; it < opts.max_iterations && b - a >= opts.interval_tol; ++it) {
        if (detail::concave_upper_bound(a, fa, c, fc, d, fd, b, fb) < -tol) break;
        if (fc < fd) {
          a = c, fa = fc;
          c = d, fc = fd;
          d = a + ratio * (b - a);
          fd = f(d);
          if (consider(fd, (1.0 - d) * sa, d * sb)) return found();
        } else {
          b = d, fb = fd;
          d = c, fd = fc;
          c = b - ratio * (b - a);
          fc = f(c);
          if (consider(fc, (1.0 - c) * sa, c * sb)) return found();
        }
      }
    }
  }
  // a best value of exactly zero or below is a semidefinite member at most: the
  // quadrics are tangent and still share a real zero
  verdict.outcome = verdict.value <= 0.0 ? PencilOutcome::NoDefinite : PencilOutcome::Borderline;
  verdict.borderline = verdict.value > -tol;
  return verdict;
}

struct OracleOptions {
  int restarts = 50;
  int steps = 500;
  /// Step multiplier after an accepted step; rejected steps halve.
  double growth = 1.25;
};

struct OracleResult {
  bool found = false;
  double best = std::numeric_limits<double>::infinity();
  /// Unit vector attaining `best`.
  Vec point;
};

/// Searches for a common real zero of <x,Q1x> and <x,Q2x> on the unit sphere by
/// Gauss-Newton with a projected gradient fallback on f = q1^2 + q2^2. A positive answer is
/// certified by `point`; a negative one is high-confidence only.
inline OracleResult common_zero_oracle(const SymMatrix& Q1, const SymMatrix& Q2, Rng& rng,
                                       const OracleOptions& opts = {}) {
  if (Q1.dim() != Q2.dim()) throw Error(ErrorKind::InvalidInput, "oracle dimension mismatch");
  if (Q1.dim() < 3) {
    throw Error(ErrorKind::UnsupportedDimension,
                "pencil criterion needs at least three variables");
  }
  const int m = Q1.dim();
  const double n1 = Q1.frobenius_norm(), n2 = Q2.frobenius_norm();
  const double scale2 = n1 * n1 + n2 * n2;
  const double threshold = 1e-8 * scale2;
  const double step0 = 0.1 / std::sqrt(std::max(scale2, detail::kNormFloor));

  auto objective = [&](const Vec& x, double& q1, double& q2) {
    q1 = Q1.quadratic_form(x);
    q2 = Q2.quadratic_form(x);
    return q1 * q1 + q2 * q2;
  };

  OracleResult result;
  Vec trial(m);
  for (int r = 0; r < opts.restarts; ++r) {
    Vec x = sample_sphere_point(rng, m - 1);
    double q1, q2;
    double fx = objective(x, q1, q2);
    double step = step0;
    for (int it = 0; it < opts.steps && fx > threshold; ++it) {
      const Vec g1 = Q1.apply(x), g2 = Q2.apply(x);
      Vec g(m);
      for (int i = 0; i < m; ++i) g[i] = 4.0 * (q1 * g1[i] + q2 * g2[i]);
      const double gx = dot(g, x);
      for (int i = 0; i < m; ++i) g[i] -= gx * x[i];
      // Gauss-Newton on (q1, q2) in the tangent plane, minimum norm step
      {
        Vec j1(m), j2(m);
        const double a1 = dot(g1, x), a2 = dot(g2, x);
        for (int i = 0; i < m; ++i) {
          j1[i] = 2.0 * (g1[i] - a1 * x[i]);
          j2[i] = 2.0 * (g2[i] - a2 * x[i]);
        }
        const double s11 = dot(j1, j1), s12 = dot(j1, j2), s22 = dot(j2, j2);
        const double det = s11 * s22 - s12 * s12;
        if (det > 1e-14 * (s11 * s22 + detail::kNormFloor)) {
          const double c1 = (s22 * q1 - s12 * q2) / det, c2 = (s11 * q2 - s12 * q1) / det;
          for (int i = 0; i < m; ++i) trial[i] = x[i] - c1 * j1[i] - c2 * j2[i];
          const double inv = 1.0 / norm(trial);
          for (double& t : trial) t *= inv;
          double t1, t2;
          const double ft = objective(trial, t1, t2);
          if (ft < fx) {
            x.swap(trial);
            fx = ft, q1 = t1, q2 = t2;
            continue;
          }
        }
      }
      bool moved = false;
      while (step > 1e-20 * step0) {
        for (int i = 0; i < m; ++i) trial[i] = x[i] - step * g[i];
        const double inv = 1.0 / norm(trial);
        for (double& t : trial) t *= inv;
        double t1, t2;
        const double ft = objective(trial, t1, t2);
        if (ft < fx) {
          x.swap(trial);
          fx = ft, q1 = t1, q2 = t2;
          moved = true;
          step *= opts.growth;
          break;
        }
        step *= 0.5;
      }
      if (!moved) break;
    }
    if (fx < result.best) {
      result.best = fx;
      result.point = x;
    }
    if (fx <= threshold) {
      result.found = true;
      break;
    }
  }
  return result;
}

enum class CalabiVerdict { Consistent, Inconsistent, Borderline };

inline const char* to_string(CalabiVerdict v) {
  switch (v) {
    case CalabiVerdict::Consistent: return "Consistent";
    case CalabiVerdict::Inconsistent: return "Inconsistent";
    case CalabiVerdict::Borderline: return "Borderline";
  }
  return "Unknown";
}

struct CalabiReport {
  CalabiVerdict verdict = CalabiVerdict::Borderline;
  PencilVerdict pencil;
  OracleResult oracle;
};

/// Cross-checks the pencil test against the common-zero oracle: consistent
/// iff exactly one of {pencil contains a definite member, oracle found a zero}.
inline CalabiReport calabi_check(const SymMatrix& Q1, const SymMatrix& Q2, Rng& rng,
                                 const OracleOptions& oracle_opts = {}) {
  CalabiReport report;
  report.pencil = pencil_contains_definite(Q1, Q2);
  report.oracle = common_zero_oracle(Q1, Q2, rng, oracle_opts);
  if (report.pencil.outcome == PencilOutcome::Borderline) {
    report.verdict = CalabiVerdict::Borderline;
    return report;
  }
  const bool definite = report.pencil.outcome == PencilOutcome::ContainsDefinite;
  report.verdict = definite != report.oracle.found ? CalabiVerdict::Consistent
                                                   : CalabiVerdict::Inconsistent;
  return report;
}

}  // namespace klab

#endif  // KLAB_PENCIL_HPP
