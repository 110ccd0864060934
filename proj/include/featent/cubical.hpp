#pragma once

// Sublevel-style filtration of a unit as a 2D cubical complex: each positive
// pixel is a closed unit square, added together with its four edges and four
// corner vertices. Squares touching at a corner share that vertex.

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <vector>

#include "featent/activation.hpp"
#include "featent/gf2.hpp"
#include "featent/homology.hpp"

namespace featent {

class IncrementalCubicalHomology {
 public:
  explicit IncrementalCubicalHomology(std::size_t side)
      : side_(side),
        vertex_present_((side + 1) * (side + 1), 0),
        hedge_present_((side + 1) * side, 0),
        vedge_present_(side * (side + 1), 0),
        pixel_present_(side * side, 0),
        components_((side + 1) * (side + 1)) {}

  void add_pixel(std::size_t row, std::size_t col) {
    if (row >= side_ || col >= side_) throw ValidationError("pixel out of range");
    auto& p = pixel_present_[row * side_ + col];
    if (p) throw ValidationError("pixel added twice");
    p = 1;
    ++faces_;

    const std::uint32_t corners[4] = {vid(row, col), vid(row, col + 1), vid(row + 1, col), vid(row + 1, col + 1)};
    for (auto c : corners) {
      if (!vertex_present_[c]) {
        vertex_present_[c] = 1;
        ++vertices_;
        ++beta0_;
      }
    }
    add_edge(hedge_present_[row * side_ + col], corners[0], corners[1]);
    add_edge(hedge_present_[(row + 1) * side_ + col], corners[2], corners[3]);
    add_edge(vedge_present_[row * (side_ + 1) + col], corners[0], corners[2]);
    add_edge(vedge_present_[row * (side_ + 1) + col + 1], corners[1], corners[3]);
  }

  std::size_t betti(int k) const {
    require_supported_degree(k);
    if (k == 0) return beta0_;
    // Planar cubical sets have no 2-cycles, so beta_1 = beta_0 - chi.
    const auto chi = static_cast<long long>(vertices_) - static_cast<long long>(edges_) + static_cast<long long>(faces_);
    return static_cast<std::size_t>(static_cast<long long>(beta0_) - chi);
  }

 private:
  std::uint32_t vid(std::size_t r, std::size_t c) const noexcept {
    return static_cast<std::uint32_t>(r * (side_ + 1) + c);
  }

  void add_edge(std::uint8_t& present, std::uint32_t a, std::uint32_t b) {
    if (present) return;
    present = 1;
    ++edges_;
    if (components_.unite(a, b)) --beta0_;
  }

  std::size_t side_;
  std::vector<std::uint8_t> vertex_present_, hedge_present_, vedge_present_, pixel_present_;
  UnionFind components_;
  std::size_t vertices_ = 0, edges_ = 0, faces_ = 0, beta0_ = 0;
};

struct PixelEvent {
  std::size_t rank = 0;
  std::size_t row = 0, col = 0;
};

/// Positive pixels in descending value order; tied values share the first
/// rank of their group. Diagonal pixels are ordinary pixels here.
inline std::vector<PixelEvent> cubical_filtration(const ActivationUnit& unit, std::size_t* total_ranks = nullptr) {
  const std::size_t m = unit.side();
  std::vector<std::size_t> order;
  for (std::size_t i = 0; i < m * m; ++i) {
    if (unit.values()[i] > 0.0) order.push_back(i);
  }
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return unit.values()[a] > unit.values()[b]; });
  std::vector<PixelEvent> events;
  events.reserve(order.size());
  std::size_t group_rank = 0;
  for (std::size_t r = 0; r < order.size(); ++r) {
    if (r == 0 || unit.values()[order[r]] != unit.values()[order[r - 1]]) group_rank = r + 1;
    events.push_back({group_rank, order[r] / m, order[r] % m});
  }
  if (total_ranks) *total_ranks = order.size();
  return events;
}

inline BettiCurve cubical_betti_curve(const ActivationUnit& unit, int k) {
  require_supported_degree(k);
  std::size_t total = 0;
  const auto events = cubical_filtration(unit, &total);
  IncrementalCubicalHomology homology(unit.side());
  BettiCurve curve{k, {}};
  std::size_t next = 0;
  for (std::size_t rank = 1; rank <= total; ++rank) {
    while (next < events.size() && events[next].rank == rank) {
      homology.add_pixel(events[next].row, events[next].col);
      ++next;
    }
    curve.values.push_back(homology.betti(k));
  }
  return curve;
}

inline BirthTime cubical_birth_time(const ActivationUnit& unit, int k) {
  require_supported_degree(k);
  const auto events = cubical_filtration(unit);
  IncrementalCubicalHomology homology(unit.side());
  std::size_t next = 0;
  while (next < events.size()) {
    const std::size_t rank = events[next].rank;
    while (next < events.size() && events[next].rank == rank) {
      homology.add_pixel(events[next].row, events[next].col);
      ++next;
    }
    if (homology.betti(k) != 0) return BirthTime::at(rank);
  }
  return BirthTime::none();
}

}  // namespace featent
