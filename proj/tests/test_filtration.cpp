#include <catch_amalgamated.hpp>

#include <cmath>
#include <map>
#include <numeric>

#include "featent/filtration.hpp"
#include "test_support.hpp"

using namespace featent;
using featent::testing::as_set;
using featent::testing::random_unit;
using featent::testing::toy_unit;

TEST_CASE("build_adjacency mirrors the unit", "[filtration]") {
  const ActivationUnit u(2, {1, 2, 3, 0});
  const auto a = build_adjacency(u);
  CHECK(a.side() == 2);
  CHECK(a.at(0, 0) == 1);
  CHECK(a.at(0, 1) == 2);
  CHECK(a.at(1, 0) == 3);
  CHECK(a.at(1, 1) == 0);

  const auto z = build_adjacency(ActivationUnit::zeros(4));
  for (std::size_t i = 0; i < 4; ++i)
    for (std::size_t j = 0; j < 4; ++j) CHECK(z.at(i, j) == 0.0);
}

TEST_CASE("toy unit: top four entries and the rank-4 prefix", "[filtration][toy]") {
  const auto f = build_filtration(toy_unit());
  const auto events = f.events();
  REQUIRE(events.size() >= 4);
  CHECK(events[0].value == 0.90);
  CHECK(events[1].value == 0.80);
  CHECK(events[2].value == 0.70);
  CHECK(events[3].value == 0.60);
  CHECK(f.total_ranks() == 12);
  CHECK(as_set(f.edges_at(4)) ==
        std::set<Edge>{Edge::make(0, 1), Edge::make(2, 3), Edge::make(1, 3), Edge::make(0, 2)});
}

TEST_CASE("symmetrized edge enters at the larger directed entry", "[filtration]") {
  std::vector<double> v(9, 0.0);
  v[0 * 3 + 1] = 5;
  v[1 * 3 + 0] = 3;
  const auto f = build_filtration(ActivationUnit(3, v));
  REQUIRE(f.events().size() == 1);
  CHECK(f.events()[0].rank == 1);
  CHECK(f.events()[0].value == 5);
  CHECK(f.events()[0].edge == Edge::make(0, 1));
  CHECK(f.total_ranks() == 2);
  CHECK(f.edges_at(1) == f.edges_at(2));
}

TEST_CASE("all-zero unit gives an empty filtration", "[filtration]") {
  const auto f = build_filtration(ActivationUnit::zeros(4));
  CHECK(f.events().empty());
  CHECK(f.total_ranks() == 0);
}

TEST_CASE("diagonal entries never enter", "[filtration]") {
  const ActivationUnit u(3, {9, 0, 0, 0, 9, 1, 0, 0, 9});
  const auto f = build_filtration(u);
  REQUIRE(f.events().size() == 1);
  CHECK(f.events()[0].edge == Edge::make(1, 2));
  CHECK(f.total_ranks() == 1);
}

TEST_CASE("tied values share the first rank of the tie", "[filtration]") {
  // Off-diagonal values: 3, 2, 2, 2, 1, 1; edge {1,2} is 1 both ways.
  const ActivationUnit u(3, {0, 3, 2, 2, 0, 1, 2, 1, 0});
  const auto f = build_filtration(u);
  CHECK(f.total_ranks() == 6);
  std::map<std::size_t, std::set<Edge>> by_rank;
  for (const auto& e : f.events()) by_rank[e.rank].insert(e.edge);
  CHECK(by_rank[1] == std::set<Edge>{Edge::make(0, 1)});
  CHECK(by_rank[2] == std::set<Edge>{Edge::make(0, 2)});
  CHECK(by_rank[5] == std::set<Edge>{Edge::make(1, 2)});
  CHECK(by_rank.size() == 3);
  CHECK(f.edges_at(2) == f.edges_at(4));
}

TEST_CASE("filtration properties on random units", "[filtration][property]") {
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    const std::size_t m = 2 + seed % 9;
    const auto u = random_unit(m, 0.6, seed);
    const auto f = build_filtration(u);

    std::size_t positive = 0;
    for (std::size_t i = 0; i < m; ++i)
      for (std::size_t j = 0; j < m; ++j) positive += (i != j && u.at(i, j) > 0.0);
    REQUIRE(f.total_ranks() == positive);

    std::set<Edge> seen;
    std::size_t last_rank = 0;
    double last_value = INFINITY;
    for (const auto& e : f.events()) {
      REQUIRE(e.edge.u < e.edge.v);
      REQUIRE(e.rank >= last_rank);
      REQUIRE(e.value <= last_value);
      REQUIRE(e.value == std::max(u.at(e.edge.u, e.edge.v), u.at(e.edge.v, e.edge.u)));
      // The rank is one more than the count of strictly larger entries.
      std::size_t larger = 0;
      for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j < m; ++j) larger += (i != j && u.at(i, j) > e.value);
      REQUIRE(e.rank == larger + 1);
      REQUIRE(seen.insert(e.edge).second);
      last_rank = e.rank;
      last_value = e.value;
    }
    // Nesting of prefixes.
    for (std::size_t v = 1; v < f.total_ranks(); ++v) {
      const auto a = as_set(f.edges_at(v));
      const auto b = as_set(f.edges_at(v + 1));
      REQUIRE(std::includes(b.begin(), b.end(), a.begin(), a.end()));
    }
  }
}

TEST_CASE("filtration depends only on value order", "[filtration][property]") {
  auto same_edges = [](const GraphFiltration& a, const GraphFiltration& b) {
    if (a.total_ranks() != b.total_ranks() || a.events().size() != b.events().size()) return false;
    for (std::size_t i = 0; i < a.events().size(); ++i) {
      if (a.events()[i].rank != b.events()[i].rank || !(a.events()[i].edge == b.events()[i].edge)) return false;
    }
    return true;
  };
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    const auto u = random_unit(7, 0.7, 1000 + seed);
    const auto f = build_filtration(u);
    CHECK(same_edges(f, build_filtration(featent::testing::map_values(u, [](double x) { return x * x * x; }))));
    CHECK(same_edges(f, build_filtration(featent::testing::map_values(u, [](double x) { return std::sqrt(x); }))));
    CHECK(same_edges(f, build_filtration(featent::testing::map_values(u, [](double x) { return 7.5 * x; }))));
  }
}
