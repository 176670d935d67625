#ifndef KLAB_GRAPHS_HPP
#define KLAB_GRAPHS_HPP

// Obstacle random graphs and quadric intersection graphs.
//
// The obstacle graph on points q_1..q_s joins q_i and q_j when the projective
// line through them misses the obstacle. Every vertex is kept, including the
// ones inside the obstacle (which are isolated).

#include <atomic>
#include <bit>
#include <cstddef>
#include <cstdint>
#include <map>
#include <numeric>
#include <span>
#include <string>
#include <vector>

#include "klab/errors.hpp"
#include "klab/geometry.hpp"
#include "klab/linalg.hpp"
#include "klab/parallel.hpp"
#include "klab/pencil.hpp"

namespace klab {

/// Union-find with path compression and union by rank.
class Dsu {
 public:
  explicit Dsu(std::size_t n) : parent_(n), rank_(n, 0), components_(n) {
    std::iota(parent_.begin(), parent_.end(), std::size_t{0});
  }

  std::size_t find(std::size_t x) {
    std::size_t root = x;
    while (parent_[root] != root) root = parent_[root];
    while (parent_[x] != root) {
      const std::size_t next = parent_[x];
      parent_[x] = root;
      x = next;
    }
    return root;
  }

  bool unite(std::size_t a, std::size_t b) {
    a = find(a);
    b = find(b);
    if (a == b) return false;
    if (rank_[a] < rank_[b]) std::swap(a, b);
    parent_[b] = a;
    if (rank_[a] == rank_[b]) ++rank_[a];
    --components_;
    return true;
  }

  bool same(std::size_t a, std::size_t b) { return find(a) == find(b); }
  std::size_t components() const noexcept { return components_; }
  std::size_t size() const noexcept { return parent_.size(); }

 private:
  std::vector<std::size_t> parent_;
  std::vector<unsigned> rank_;
  std::size_t components_;
};

/// Symmetric adjacency stored as packed upper-triangle bits (i < j once).
class AdjacencyBits {
 public:
  AdjacencyBits() = default;
  explicit AdjacencyBits(std::size_t s) : s_(s), words_((pairs(s) + 63) / 64, 0) {}

  std::size_t vertices() const noexcept { return s_; }

  bool test(std::size_t i, std::size_t j) const {
    if (i == j) return false;
    const std::size_t k = bit_index(i, j);
    return (words_[k / 64] >> (k % 64)) & 1u;
  }

  /// Safe to call concurrently for distinct pairs.
  void set(std::size_t i, std::size_t j) {
    if (i == j) throw Error(ErrorKind::InvalidInput, "self-loop");
    const std::size_t k = bit_index(i, j);
    std::atomic_ref<std::uint64_t>(words_[k / 64]).fetch_or(std::uint64_t{1} << (k % 64),
                                                           std::memory_order_relaxed);
  }

  std::size_t edge_count() const {
    std::size_t n = 0;
    for (auto w : words_) n += static_cast<std::size_t>(std::popcount(w));
    return n;
  }

  friend bool operator==(const AdjacencyBits&, const AdjacencyBits&) = default;

 private:
  static std::size_t pairs(std::size_t s) { return s < 2 ? 0 : s * (s - 1) / 2; }

  std::size_t bit_index(std::size_t i, std::size_t j) const {
    if (i > j) std::swap(i, j);
    return i * (2 * s_ - i - 1) / 2 + (j - i - 1);
  }

  std::size_t s_ = 0;
  std::vector<std::uint64_t> words_;
};

struct GraphMeta {
  std::string obstacle;
  std::uint64_t seed = 0;
  /// Pencil tests whose best value landed within tol of zero.
  std::size_t borderline = 0;
};

template <typename Point>
struct ObstacleGraph {
  std::vector<Point> points;
  std::vector<char> in_obstacle;
  AdjacencyBits adjacency;
  GraphMeta meta;

  std::size_t size() const noexcept { return points.size(); }
  bool has_edge(std::size_t i, std::size_t j) const { return adjacency.test(i, j); }

  std::size_t degree(std::size_t i) const {
    std::size_t d = 0;
    for (std::size_t j = 0; j < size(); ++j) d += adjacency.test(i, j) ? 1 : 0;
    return d;
  }

  std::size_t obstacle_count() const {
    std::size_t n = 0;
    for (char c : in_obstacle) n += c ? 1 : 0;
    return n;
  }
};

/// Builds the obstacle graph of `points`. Line tests run on `threads` workers;
/// the result does not depend on evaluation order. A DegeneratePairError from a
/// line test is rethrown carrying the pair indices.
template <Obstacle O>
ObstacleGraph<typename O::Point> build_obstacle_graph(const O& obst,
                                                      std::vector<typename O::Point> points,
                                                      unsigned threads = 1) {
  ObstacleGraph<typename O::Point> g;
  const std::size_t s = points.size();
  g.points = std::move(points);
  g.in_obstacle.assign(s, 0);
  g.adjacency = AdjacencyBits(s);
  for (std::size_t i = 0; i < s; ++i) g.in_obstacle[i] = obst.contains(g.points[i]) ? 1 : 0;
  parallel_for(s, threads, [&](std::size_t i) {
    if (g.in_obstacle[i]) return;  // a line through a contained point always hits
    for (std::size_t j = i + 1; j < s; ++j) {
      if (g.in_obstacle[j]) continue;
      bool hit;
      try {
        hit = obst.hit_by_line(g.points[i], g.points[j]);
      } catch (const DegeneratePairError& e) {
        throw DegeneratePairError(e.what(), i, j);
      }
      if (!hit) g.adjacency.set(i, j);
    }
  });
  return g;
}

/// Intersection graph of the real zero sets of quadrics: definite quadrics
/// (empty zero set) are isolated obstacle vertices; two others are joined when
/// their pencil has no definite member.
inline ObstacleGraph<SymMatrix> quadric_intersection_graph(std::vector<SymMatrix> matrices,
                                                           unsigned threads = 1) {
  ObstacleGraph<SymMatrix> g;
  const std::size_t s = matrices.size();
  g.points = std::move(matrices);
  g.in_obstacle.assign(s, 0);
  g.adjacency = AdjacencyBits(s);
  g.meta.obstacle = "psd-cone";
  for (std::size_t i = 0; i < s; ++i) g.in_obstacle[i] = is_definite(g.points[i]) ? 1 : 0;
  std::atomic<std::size_t> borderline{0};
  parallel_for(s, threads, [&](std::size_t i) {
    if (g.in_obstacle[i]) return;
    for (std::size_t j = i + 1; j < s; ++j) {
      if (g.in_obstacle[j]) continue;
      const auto v = pencil_contains_definite(g.points[i], g.points[j]);
      if (v.outcome == PencilOutcome::NoDefinite) g.adjacency.set(i, j);
      if (v.borderline) borderline.fetch_add(1);
    }
  });
  g.meta.borderline = borderline.load();
  return g;
}

struct QuadricArrangementCount {
  std::size_t b0_graph = 0;   ///< components of the obstacle graph
  std::size_t definite = 0;   ///< isolated obstacle vertices
  std::size_t borderline = 0; ///< among the pencil tests actually evaluated
  std::size_t tests = 0;      ///< pencil tests evaluated

  /// Components of the union of the zero sets.
  std::size_t b0_zero_sets() const { return b0_graph - definite; }
};

/// Components of the quadric intersection graph without materializing it:
/// pairs already joined through earlier edges are not tested. Sequential, so
/// the borderline and test counters are deterministic.
inline QuadricArrangementCount quadric_arrangement_b0(std::span<const SymMatrix> matrices) {
  const std::size_t s = matrices.size();
  QuadricArrangementCount out;
  std::vector<char> definite(s, 0);
  for (std::size_t i = 0; i < s; ++i) {
    definite[i] = is_definite(matrices[i]) ? 1 : 0;
    out.definite += definite[i];
  }
  Dsu dsu(s);
  for (std::size_t i = 0; i < s; ++i) {
    if (definite[i]) continue;
    for (std::size_t j = i + 1; j < s; ++j) {
      if (definite[j] || dsu.same(i, j)) continue;
      ++out.tests;
      const auto v = pencil_contains_definite(matrices[i], matrices[j]);
      if (v.outcome == PencilOutcome::NoDefinite) dsu.unite(i, j);
      if (v.borderline) ++out.borderline;
    }
  }
  out.b0_graph = dsu.components();
  return out;
}

template <typename Point>
std::size_t connected_components(const ObstacleGraph<Point>& g) {
  const std::size_t s = g.size();
  Dsu dsu(s);
  for (std::size_t i = 0; i < s; ++i)
    for (std::size_t j = i + 1; j < s; ++j)
      if (g.adjacency.test(i, j)) dsu.unite(i, j);
  return dsu.components();
}

template <typename Point>
std::size_t isolated_count(const ObstacleGraph<Point>& g) {
  std::size_t n = 0;
  for (std::size_t i = 0; i < g.size(); ++i) n += g.degree(i) == 0 ? 1 : 0;
  return n;
}

template <typename Point>
std::map<std::size_t, std::size_t> degree_histogram(const ObstacleGraph<Point>& g) {
  std::map<std::size_t, std::size_t> hist;
  for (std::size_t i = 0; i < g.size(); ++i) ++hist[g.degree(i)];
  return hist;
}

struct RegionCounts {
  std::size_t s_e = 0;  ///< outside the eps-dilation
  std::size_t s_a = 0;  ///< in the dilation but outside the obstacle
  std::size_t s_p = 0;  ///< inside the obstacle
};

template <Obstacle O>
RegionCounts region_counts(std::span<const typename O::Point> points, const O& obst, double eps) {
  RegionCounts rc;
  for (const auto& p : points) {
    if (obst.contains(p)) ++rc.s_p;
    else if (obst.contains_eps(p, eps)) ++rc.s_a;
    else ++rc.s_e;
  }
  return rc;
}

}  // namespace klab

#endif  // KLAB_GRAPHS_HPP
