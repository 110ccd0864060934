#pragma once

// Clique (flag) complex homology over GF(2) for degrees 0 and 1.

#include <algorithm>
#include <array>
#include <bit>
#include <cstddef>
#include <cstdint>
#include <numeric>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "featent/error.hpp"
#include "featent/filtration.hpp"
#include "featent/gf2.hpp"

namespace featent {

inline void require_supported_degree(int k) {
  if (k != 0 && k != 1) throw ValidationError("unsupported homology degree " + std::to_string(k) + " (expected 0 or 1)");
}

using Triangle = std::array<std::uint32_t, 3>;

/// Clique complex truncated at dimension `dimension_cap`: vertices, edges,
/// and (for cap 2) every triangle whose three edges are present.
struct FlagComplex {
  std::size_t vertex_count = 0;
  std::vector<Edge> edges;           ///< sorted, unique
  std::vector<Triangle> triangles;   ///< sorted vertex triples, sorted
  int dimension_cap = 1;
};

namespace detail {

/// Per-vertex neighbour bitsets.
class AdjacencyBits {
 public:
  explicit AdjacencyBits(std::size_t vertex_count)
      : words_((vertex_count + 63) / 64), bits_(vertex_count * words_, 0) {}

  void connect(std::uint32_t a, std::uint32_t b) noexcept {
    bits_[a * words_ + b / 64] |= std::uint64_t{1} << (b % 64);
    bits_[b * words_ + a / 64] |= std::uint64_t{1} << (a % 64);
  }

  /// Calls fn(w) for every common neighbour w of a and b, ascending.
  template <typename Fn>
  void for_each_common(std::uint32_t a, std::uint32_t b, Fn&& fn) const {
    const std::uint64_t* ra = &bits_[a * words_];
    const std::uint64_t* rb = &bits_[b * words_];
    for (std::size_t w = 0; w < words_; ++w) {
      std::uint64_t common = ra[w] & rb[w];
      while (common) {
        const int bit = std::countr_zero(common);
        fn(static_cast<std::uint32_t>(w * 64 + static_cast<std::size_t>(bit)));
        common &= common - 1;
      }
    }
  }

 private:
  std::size_t words_;
  std::vector<std::uint64_t> bits_;
};

inline void validate_edge(const Edge& e, std::size_t vertex_count) {
  if (e.u == e.v) throw ValidationError("self-loop on vertex " + std::to_string(e.u));
  if (e.v >= vertex_count) throw ValidationError("edge endpoint " + std::to_string(e.v) + " out of range");
}

}  // namespace detail

inline FlagComplex flag_complex(std::span<const Edge> edges, std::size_t vertex_count, int k) {
  require_supported_degree(k);
  FlagComplex fc;
  fc.vertex_count = vertex_count;
  fc.dimension_cap = k + 1;
  for (Edge e : edges) {
    e = Edge::make(e.u, e.v);
    detail::validate_edge(e, vertex_count);
    fc.edges.push_back(e);
  }
  std::sort(fc.edges.begin(), fc.edges.end());
  fc.edges.erase(std::unique(fc.edges.begin(), fc.edges.end()), fc.edges.end());

  if (fc.dimension_cap >= 2) {
    detail::AdjacencyBits adj(vertex_count);
    for (const Edge& e : fc.edges) adj.connect(e.u, e.v);
    // Each triangle is reported once, from its two smallest vertices.
    for (const Edge& e : fc.edges) {
      adj.for_each_common(e.u, e.v, [&](std::uint32_t w) {
        if (w > e.v) fc.triangles.push_back({e.u, e.v, w});
      });
    }
    std::sort(fc.triangles.begin(), fc.triangles.end());
  }
  return fc;
}

/// k-th Betti number of a materialized flag complex over GF(2).
/// beta_0 counts every vertex, isolated or not.
inline std::size_t betti_numbers(const FlagComplex& complex, int k) {
  require_supported_degree(k);
  if (complex.dimension_cap < k + 1) throw ValidationError("complex was built without the simplices degree k needs");

  UnionFind components(complex.vertex_count);
  std::size_t beta0 = complex.vertex_count;
  for (const Edge& e : complex.edges) {
    if (components.unite(e.u, e.v)) --beta0;
  }
  if (k == 0) return beta0;

  auto edge_index = [&](std::uint32_t a, std::uint32_t b) {
    const Edge key = Edge::make(a, b);
    const auto it = std::lower_bound(complex.edges.begin(), complex.edges.end(), key);
    if (it == complex.edges.end() || *it != key) throw InvariantError("triangle edge missing from flag complex");
    return static_cast<std::uint32_t>(it - complex.edges.begin());
  };
  Gf2ColumnReducer boundary;
  for (const Triangle& t : complex.triangles) {
    std::vector<std::uint32_t> column{edge_index(t[0], t[1]), edge_index(t[0], t[2]), edge_index(t[1], t[2])};
    std::sort(column.begin(), column.end());
    boundary.add(std::move(column));
  }
  // dim Z_1 = E - V + beta_0; beta_1 = dim Z_1 - rank(boundary_2).
  return complex.edges.size() + beta0 - complex.vertex_count - boundary.rank();
}

/// Flag-complex homology maintained under edge insertion.
///
/// beta_0 comes from a union-find. The cycle space has dimension
/// E - V + beta_0, and beta_1 subtracts the rank of the triangle boundary
/// matrix, which grows as each new triangle's boundary is reduced against
/// the existing basis. New triangles are exactly the common neighbours of a
/// new edge's endpoints.
class IncrementalFlagHomology {
 public:
  IncrementalFlagHomology(std::size_t vertex_count, int max_degree)
      : vertex_count_(vertex_count),
        track_triangles_(max_degree >= 1),
        adjacency_(vertex_count),
        edge_id_(vertex_count * vertex_count, -1),
        components_(vertex_count),
        beta0_(vertex_count) {
    require_supported_degree(max_degree);
  }

  void add_edge(Edge e) {
    e = Edge::make(e.u, e.v);
    detail::validate_edge(e, vertex_count_);
    auto& slot = edge_id_[e.u * vertex_count_ + e.v];
    if (slot >= 0) throw ValidationError("edge added twice");
    const auto id = static_cast<std::uint32_t>(edge_count_++);
    slot = static_cast<std::int32_t>(id);
    if (components_.unite(e.u, e.v)) --beta0_;

    if (track_triangles_) {
      adjacency_.for_each_common(e.u, e.v, [&](std::uint32_t w) {
        std::vector<std::uint32_t> column{id_of(e.u, w), id_of(e.v, w), id};
        if (column[0] > column[1]) std::swap(column[0], column[1]);
        ++triangle_count_;
        boundary_.add(std::move(column));
      });
    }
    adjacency_.connect(e.u, e.v);
  }

  std::size_t betti(int k) const {
    require_supported_degree(k);
    if (k == 0) return beta0_;
    if (!track_triangles_) throw ValidationError("degree 1 requested from a degree 0 tracker");
    return edge_count_ + beta0_ - vertex_count_ - boundary_.rank();
  }

  std::size_t edge_count() const noexcept { return edge_count_; }
  std::size_t triangle_count() const noexcept { return triangle_count_; }

 private:
  std::uint32_t id_of(std::uint32_t a, std::uint32_t b) const {
    const Edge e = Edge::make(a, b);
    return static_cast<std::uint32_t>(edge_id_[e.u * vertex_count_ + e.v]);
  }

  std::size_t vertex_count_;
  bool track_triangles_;
  detail::AdjacencyBits adjacency_;
  std::vector<std::int32_t> edge_id_;
  UnionFind components_;
  std::size_t beta0_;
  std::size_t edge_count_ = 0;
  std::size_t triangle_count_ = 0;
  Gf2ColumnReducer boundary_;
};

/// values[v - 1] is beta_k of the clique complex at rank v.
struct BettiCurve {
  int k = 1;
  std::vector<std::size_t> values;
};

inline BettiCurve betti_curve(const GraphFiltration& filtration, int k) {
  IncrementalFlagHomology homology(filtration.vertex_count(), k);
  BettiCurve curve{k, {}};
  curve.values.reserve(filtration.total_ranks());
  const auto events = filtration.events();
  std::size_t next = 0;
  for (std::size_t rank = 1; rank <= filtration.total_ranks(); ++rank) {
    while (next < events.size() && events[next].rank == rank) homology.add_edge(events[next++].edge);
    curve.values.push_back(homology.betti(k));
  }
  return curve;
}

struct BirthTime {
  bool defined = false;
  std::size_t rank = 0;  ///< valid only when defined

  static BirthTime none() noexcept { return {}; }
  static BirthTime at(std::size_t rank) noexcept { return {true, rank}; }
  friend bool operator==(const BirthTime&, const BirthTime&) = default;
};

/// Birth time plus the work spent finding it.
struct BirthTrace {
  BirthTime birth;
  std::size_t ranks_evaluated = 0;  ///< birth rank, or total_ranks when undefined
  std::size_t events_applied = 0;   ///< edges inserted before stopping
};

/// First rank with nonzero beta_k. Stops at the first rank group that makes
/// beta_k nonzero; events past the birth are never inserted.
inline BirthTrace trace_birth_time(const GraphFiltration& filtration, int k) {
  IncrementalFlagHomology homology(filtration.vertex_count(), k);
  BirthTrace trace;
  const auto events = filtration.events();
  std::size_t next = 0;
  while (next < events.size()) {
    const std::size_t rank = events[next].rank;
    while (next < events.size() && events[next].rank == rank) {
      homology.add_edge(events[next++].edge);
      ++trace.events_applied;
    }
    if (homology.betti(k) != 0) {
      trace.birth = BirthTime::at(rank);
      trace.ranks_evaluated = rank;
      return trace;
    }
  }
  trace.ranks_evaluated = filtration.total_ranks();
  return trace;
}

inline BirthTime birth_time(const GraphFiltration& filtration, int k) { return trace_birth_time(filtration, k).birth; }

inline BirthTime birth_time(const ActivationUnit& unit, int k) { return birth_time(build_filtration(unit), k); }

inline std::size_t curve_maximum(const BettiCurve& curve) noexcept {
  return curve.values.empty() ? 0 : *std::max_element(curve.values.begin(), curve.values.end());
}

inline std::size_t curve_integral(const BettiCurve& curve) noexcept {
  return std::accumulate(curve.values.begin(), curve.values.end(), std::size_t{0});
}

/// Scalar summary of a unit's Betti curve used to build a birth-style
/// distribution.
enum class CurveFeature { birth_time, maximum, argmax, integral };

/// First rank (1-based) at which the curve attains its maximum; 0 for an
/// empty curve.
inline std::size_t curve_argmax(const BettiCurve& curve) noexcept {
  if (curve.values.empty()) return 0;
  return static_cast<std::size_t>(std::max_element(curve.values.begin(), curve.values.end()) - curve.values.begin()) + 1;
}

/// Returns nothing when the curve is identically zero, so every feature
/// shares the same notion of an unresponsive sample.
inline std::optional<std::size_t> characterize(const GraphFiltration& filtration, int k, CurveFeature feature) {
  if (feature == CurveFeature::birth_time) {
    const BirthTime b = birth_time(filtration, k);
    return b.defined ? std::optional<std::size_t>(b.rank) : std::nullopt;
  }
  const BettiCurve curve = betti_curve(filtration, k);
  if (curve_maximum(curve) == 0) return std::nullopt;
  switch (feature) {
    case CurveFeature::maximum: return curve_maximum(curve);
    case CurveFeature::argmax: return curve_argmax(curve);
    default: return curve_integral(curve);
  }
}

}  // namespace featent
