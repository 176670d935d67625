#ifndef KLAB_SAMPLING_HPP
#define KLAB_SAMPLING_HPP

// Seeded sampling of Gaussians, sphere points, Kostlan polynomials and GOE
// matrices.
//
// Stream contract:
//  - bits come from std::mt19937_64 seeded with the 64-bit seed (the engine
//    is bit-exactly specified by the C++ standard);
//  - uniforms in [0, 1) are the top 53 bits of one engine output times 2^-53;
//  - standard normals use the Marsaglia polar method: draw u, v = 2U - 1
//    until 0 < s = u^2 + v^2 < 1, emit u*f then v*f with f = sqrt(-2 ln s / s);
//  - per-trial seeds are mix(master_seed, trial_index), a splitmix64
//    finalizer applied to master_seed + (trial_index + 1) * 0x9E3779B97F4A7C15.

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include "klab/errors.hpp"
#include "klab/linalg.hpp"

namespace klab {

inline constexpr std::uint64_t mix(std::uint64_t seed, std::uint64_t index) {
  std::uint64_t z = seed + (index + 1) * 0x9E3779B97F4A7C15ULL;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

/// Single-owner random stream. Not shared between threads.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : seed_(seed), engine_(seed) {}

  std::uint64_t seed() const noexcept { return seed_; }

  std::uint64_t next_u64() { return engine_(); }

  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  double gaussian() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    double u, v, s;
    do {
      u = 2.0 * uniform() - 1.0;
      v = 2.0 * uniform() - 1.0;
      s = u * u + v * v;
    } while (s >= 1.0 || s == 0.0);
    const double f = std::sqrt(-2.0 * std::log(s) / s);
    spare_ = v * f;
    has_spare_ = true;
    return u * f;
  }

  /// Independent child stream for sub-task `index`.
  Rng derive(std::uint64_t index) const { return Rng(mix(seed_, index)); }

 private:
  std::uint64_t seed_;
  std::mt19937_64 engine_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

/// Uniform point on S^N (a unit vector of length N + 1).
inline Vec sample_sphere_point(Rng& rng, int N) {
  if (N < 1) throw Error(ErrorKind::InvalidInput, "sphere dimension must be >= 1");
  Vec x(static_cast<std::size_t>(N) + 1);
  double r2 = 0.0;
  do {
    r2 = 0.0;
    for (double& xi : x) {
      xi = rng.gaussian();
      r2 += xi * xi;
    }
  } while (r2 == 0.0);
  const double inv = 1.0 / std::sqrt(r2);
  for (double& xi : x) xi *= inv;
  return x;
}

/// Flips x so that its first nonzero coordinate is positive.
inline void canonicalize_projective(Vec& x) {
  for (double xi : x) {
    if (xi == 0.0) continue;
    if (xi < 0.0)
      for (double& y : x) y = -y;
    return;
  }
}

/// Point on the unit circle at geodesic angle `angle` from unit vector `from`
/// in the direction of unit vector `toward` (orthogonalized against `from`).
inline Vec rotate_toward(std::span<const double> from, std::span<const double> toward,
                         double angle) {
  const double ft = dot(from, toward);
  Vec w(from.size());
  for (std::size_t i = 0; i < w.size(); ++i) w[i] = toward[i] - ft * from[i];
  const double wn = norm(w);
  if (wn < 1e-12) throw DegeneratePairError("rotation direction parallel to base point");
  Vec out(from.size());
  for (std::size_t i = 0; i < w.size(); ++i)
    out[i] = std::cos(angle) * from[i] + std::sin(angle) * w[i] / wn;
  return out;
}

/// Haar-distributed orthogonal matrix (Gram-Schmidt of a Gaussian matrix).
inline DenseMatrix random_orthogonal(Rng& rng, int m) {
  DenseMatrix U(m);
  for (double& x : U.data) x = rng.gaussian();
  for (int j = 0; j < m; ++j) {
    for (int k = 0; k < j; ++k) {
      double p = 0.0;
      for (int i = 0; i < m; ++i) p += U(i, j) * U(i, k);
      for (int i = 0; i < m; ++i) U(i, j) -= p * U(i, k);
    }
    double n2 = 0.0;
    for (int i = 0; i < m; ++i) n2 += U(i, j) * U(i, j);
    const double inv = 1.0 / std::sqrt(n2);
    for (int i = 0; i < m; ++i) U(i, j) *= inv;
  }
  return U;
}

using MultiIndex = std::vector<int>;

/// All multi-indices (a_0, ..., a_n) with sum d, colexicographic on (a_1, ..., a_n).
inline std::vector<MultiIndex> enumerate_multi_indices(int n, int d) {
  std::vector<MultiIndex> out;
  MultiIndex tail(static_cast<std::size_t>(n), 0);  // tail[k] = a_{k+1}
  while (true) {
    int used = 0;
    for (int a : tail) used += a;
    if (used <= d) {
      MultiIndex alpha(static_cast<std::size_t>(n) + 1);
      alpha[0] = d - used;
      for (int k = 0; k < n; ++k) alpha[k + 1] = tail[k];
      out.push_back(std::move(alpha));
    }
    // odometer with a_1 fastest
    int k = 0;
    while (k < n) {
      if (++tail[k] <= d) break;
      tail[k] = 0;
      ++k;
    }
    if (k == n) break;
  }
  return out;
}

/// d! / (a_0! ... a_n!)
inline double multinomial(const MultiIndex& alpha) {
  double result = 1.0;
  int running = 0;
  for (int a : alpha) {
    for (int k = 1; k <= a; ++k) result = result * (running + k) / k;
    running += a;
  }
  return result;
}

/// Dense binary form p(x0, x1) = sum_k c_k x0^k x1^(d-k).
struct BinaryForm {
  int degree = 0;
  std::vector<double> coeffs;

  double operator()(double x0, double x1) const {
    double s = 0.0;
    for (int k = 0; k <= degree; ++k) s += coeffs[k] * std::pow(x0, k) * std::pow(x1, degree - k);
    return s;
  }

  double coefficient_norm() const {
    double s = 0.0;
    for (double c : coeffs) s += c * c;
    return std::sqrt(s);
  }
};

/// Homogeneous polynomial in n + 1 variables of degree d.
struct KostlanPoly {
  int n = 0;
  int d = 0;
  std::vector<MultiIndex> monomials;
  std::vector<double> coeffs;

  double operator()(std::span<const double> x) const {
    double s = 0.0;
    for (std::size_t k = 0; k < coeffs.size(); ++k) {
      double term = coeffs[k];
      for (int i = 0; i <= n; ++i)
        for (int e = 0; e < monomials[k][i]; ++e) term *= x[i];
      s += term;
    }
    return s;
  }

  BinaryForm to_binary_form() const {
    if (n != 1) throw Error(ErrorKind::InvalidInput, "binary form requires n = 1");
    BinaryForm f{d, std::vector<double>(static_cast<std::size_t>(d) + 1, 0.0)};
    for (std::size_t k = 0; k < coeffs.size(); ++k) f.coeffs[monomials[k][0]] = coeffs[k];
    return f;
  }

  /// Symmetric matrix Q with <x, Qx> equal to this quadric.
  SymMatrix to_sym_matrix() const {
    if (d != 2) throw Error(ErrorKind::InvalidInput, "matrix form requires degree 2");
    SymMatrix Q(n + 1);
    for (std::size_t k = 0; k < coeffs.size(); ++k) {
      int first = -1, second = -1;
      for (int i = 0; i <= n; ++i) {
        for (int e = 0; e < monomials[k][i]; ++e) (first < 0 ? first : second) = i;
      }
      if (first == second) Q(first, first) = coeffs[k];
      else Q(first, second) = 0.5 * coeffs[k];
    }
    return Q;
  }
};

/// Kostlan polynomial: coefficient of x^alpha ~ N(0, d!/alpha!), independent.
inline KostlanPoly sample_kostlan(Rng& rng, int n, int d) {
  if (n < 1 || d < 1) throw Error(ErrorKind::InvalidInput, "Kostlan sampling needs n >= 1, d >= 1");
  KostlanPoly p;
  p.n = n;
  p.d = d;
  p.monomials = enumerate_multi_indices(n, d);
  p.coeffs.reserve(p.monomials.size());
  for (const auto& alpha : p.monomials) p.coeffs.push_back(std::sqrt(multinomial(alpha)) * rng.gaussian());
  return p;
}

/// Kostlan binary form of degree d, drawn with the same stream layout as
/// sample_kostlan(rng, 1, d).
inline BinaryForm sample_binary_form(Rng& rng, int d) {
  if (d < 1) throw Error(ErrorKind::InvalidInput, "degree must be >= 1");
  BinaryForm f{d, std::vector<double>(static_cast<std::size_t>(d) + 1)};
  // colex order over a_1 visits a_0 = d, d-1, ..., 0
  double binom = 1.0;
  for (int a1 = 0; a1 <= d; ++a1) {
    if (a1 > 0) binom = binom * (d - a1 + 1) / a1;
    f.coeffs[d - a1] = std::sqrt(binom) * rng.gaussian();
  }
  return f;
}

/// GOE matrix: diagonal N(0, 1), off-diagonal N(0, 1/2), packed row-major draw order.
inline SymMatrix sample_goe(Rng& rng, int m) {
  if (m < 1) throw Error(ErrorKind::InvalidInput, "GOE dimension must be >= 1");
  SymMatrix Q(m);
  const double off_sd = std::sqrt(0.5);
  for (int i = 0; i < m; ++i)
    for (int j = i; j < m; ++j) Q(i, j) = (i == j ? 1.0 : off_sd) * rng.gaussian();
  return Q;
}

}  // namespace klab

#endif  // KLAB_SAMPLING_HPP
