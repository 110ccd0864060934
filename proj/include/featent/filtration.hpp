#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "featent/activation.hpp"

namespace featent {

/// Edge weights of the unit graph: entry (i, j) is the weight from vertex i
/// to vertex j. Mirrors the unit entry for entry.
class WeightedAdjacency {
 public:
  WeightedAdjacency(std::size_t side, std::vector<double> entries) : side_(side), entries_(std::move(entries)) {
    if (entries_.size() != side_ * side_) throw ValidationError("adjacency must be side x side");
  }

  std::size_t side() const noexcept { return side_; }
  double at(std::size_t i, std::size_t j) const noexcept { return entries_[i * side_ + j]; }
  std::span<const double> entries() const noexcept { return entries_; }

 private:
  std::size_t side_;
  std::vector<double> entries_;
};

inline WeightedAdjacency build_adjacency(const ActivationUnit& unit) {
  return WeightedAdjacency(unit.side(), std::vector<double>(unit.values().begin(), unit.values().end()));
}

/// Undirected edge with u < v.
struct Edge {
  std::uint32_t u = 0;
  std::uint32_t v = 0;

  static Edge make(std::size_t a, std::size_t b) noexcept {
    return a < b ? Edge{static_cast<std::uint32_t>(a), static_cast<std::uint32_t>(b)}
                 : Edge{static_cast<std::uint32_t>(b), static_cast<std::uint32_t>(a)};
  }
  friend auto operator<=>(const Edge&, const Edge&) = default;
};

/// An undirected edge entering the filtration at threshold rank `rank`
/// (1-based), whose threshold value is `value`.
struct EdgeEvent {
  std::size_t rank = 0;
  double value = 0.0;
  Edge edge;
};

/// Descending-threshold graph filtration.
///
/// Ranks enumerate the strictly positive off-diagonal entries in descending
/// order. The graph at rank v holds every edge whose symmetrized weight
/// max(A_ij, A_ji) is at least the v-th largest value, so tied values all
/// enter at the first rank carrying that value and the graph repeats across
/// the remaining ranks of the tie. Each edge appears in exactly one event.
class GraphFiltration {
 public:
  GraphFiltration(std::size_t vertex_count, std::vector<EdgeEvent> events, std::size_t total_ranks)
      : vertex_count_(vertex_count), events_(std::move(events)), total_ranks_(total_ranks) {}

  std::size_t vertex_count() const noexcept { return vertex_count_; }
  std::span<const EdgeEvent> events() const noexcept { return events_; }
  std::size_t total_ranks() const noexcept { return total_ranks_; }

  /// Edge set of the graph at `rank`, in event order.
  std::vector<Edge> edges_at(std::size_t rank) const {
    std::vector<Edge> out;
    for (const auto& e : events_) {
      if (e.rank > rank) break;
      out.push_back(e.edge);
    }
    return out;
  }

 private:
  std::size_t vertex_count_;
  std::vector<EdgeEvent> events_;
  std::size_t total_ranks_;
};

inline GraphFiltration build_filtration(const WeightedAdjacency& adj) {
  struct Entry {
    double value;
    std::uint32_t row, col;
  };
  const std::size_t m = adj.side();
  std::vector<Entry> entries;
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < m; ++j) {
      if (i != j && adj.at(i, j) > 0.0) {
        entries.push_back({adj.at(i, j), static_cast<std::uint32_t>(i), static_cast<std::uint32_t>(j)});
      }
    }
  }
  // Ties keep row-major order so event order is reproducible.
  std::stable_sort(entries.begin(), entries.end(), [](const Entry& a, const Entry& b) { return a.value > b.value; });

  std::vector<std::uint8_t> seen(m * m, 0);
  std::vector<EdgeEvent> events;
  std::size_t group_rank = 0;
  for (std::size_t r = 0; r < entries.size(); ++r) {
    if (r == 0 || entries[r].value != entries[r - 1].value) group_rank = r + 1;
    const Edge e = Edge::make(entries[r].row, entries[r].col);
    auto& flag = seen[e.u * m + e.v];
    if (flag) continue;
    flag = 1;
    events.push_back({group_rank, entries[r].value, e});
  }
  return GraphFiltration(m, std::move(events), entries.size());
}

inline GraphFiltration build_filtration(const ActivationUnit& unit) { return build_filtration(build_adjacency(unit)); }

}  // namespace featent
