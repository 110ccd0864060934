#pragma once

// Reference Betti numbers for small graphs, computed from first principles:
// every clique is enumerated as a vertex bitmask, boundary matrices are built
// densely, and ranks come from Gaussian elimination over GF(2). Nothing here
// is shared with the incremental engine.

#include <cstddef>
#include <cstdint>
#include <map>
#include <span>
#include <vector>

#include "featent/error.hpp"
#include "featent/filtration.hpp"

namespace featent {

inline constexpr std::size_t kBruteForceMaxVertices = 12;

namespace detail {

inline std::size_t gf2_dense_rank(std::vector<std::vector<std::uint8_t>> rows) {
  if (rows.empty()) return 0;
  const std::size_t cols = rows.front().size();
  std::size_t rank = 0;
  for (std::size_t c = 0; c < cols && rank < rows.size(); ++c) {
    std::size_t pivot = rank;
    while (pivot < rows.size() && !rows[pivot][c]) ++pivot;
    if (pivot == rows.size()) continue;
    std::swap(rows[pivot], rows[rank]);
    for (std::size_t r = 0; r < rows.size(); ++r) {
      if (r != rank && rows[r][c]) {
        for (std::size_t j = 0; j < cols; ++j) rows[r][j] ^= rows[rank][j];
      }
    }
    ++rank;
  }
  return rank;
}

}  // namespace detail

/// beta_k of the clique complex of a graph with at most 12 vertices.
inline std::size_t brute_force_betti(std::span<const Edge> edges, std::size_t vertex_count, int k) {
  if (vertex_count > kBruteForceMaxVertices) throw ValidationError("brute-force oracle is capped at 12 vertices");
  if (k < 0) throw ValidationError("negative homology degree");

  std::vector<std::vector<bool>> adjacent(vertex_count, std::vector<bool>(vertex_count, false));
  for (const Edge& e : edges) {
    if (e.u == e.v || e.u >= vertex_count || e.v >= vertex_count) throw ValidationError("bad edge for oracle");
    adjacent[e.u][e.v] = adjacent[e.v][e.u] = true;
  }

  // simplices[d] lists the vertex masks of every d-simplex (clique of d+1 vertices).
  const auto dims = static_cast<std::size_t>(k) + 2;
  std::vector<std::vector<std::uint32_t>> simplices(dims);
  for (std::uint32_t mask = 1; mask < (std::uint32_t{1} << vertex_count); ++mask) {
    std::vector<std::size_t> verts;
    for (std::size_t v = 0; v < vertex_count; ++v) {
      if (mask & (std::uint32_t{1} << v)) verts.push_back(v);
    }
    if (verts.size() > dims) continue;
    bool clique = true;
    for (std::size_t a = 0; a < verts.size() && clique; ++a) {
      for (std::size_t b = a + 1; b < verts.size() && clique; ++b) clique = adjacent[verts[a]][verts[b]];
    }
    if (clique) simplices[verts.size() - 1].push_back(mask);
  }

  // Rank of the boundary map from d-simplices to (d-1)-simplices.
  auto boundary_rank = [&](std::size_t d) -> std::size_t {
    if (d == 0 || d >= simplices.size()) return 0;
    std::map<std::uint32_t, std::size_t> face_index;
    for (std::size_t i = 0; i < simplices[d - 1].size(); ++i) face_index[simplices[d - 1][i]] = i;
    std::vector<std::vector<std::uint8_t>> matrix(simplices[d - 1].size(),
                                                  std::vector<std::uint8_t>(simplices[d].size(), 0));
    for (std::size_t j = 0; j < simplices[d].size(); ++j) {
      const std::uint32_t s = simplices[d][j];
      for (std::size_t v = 0; v < vertex_count; ++v) {
        if (s & (std::uint32_t{1} << v)) matrix[face_index.at(s & ~(std::uint32_t{1} << v))][j] = 1;
      }
    }
    return detail::gf2_dense_rank(std::move(matrix));
  };

  const auto kk = static_cast<std::size_t>(k);
  return simplices[kk].size() - boundary_rank(kk) - boundary_rank(kk + 1);
}

}  // namespace featent
