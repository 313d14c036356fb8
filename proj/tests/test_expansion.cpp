#include <cmath>

#include "doctest.h"
#include "outbreak/expansion.hpp"
#include "outbreak/generators.hpp"
#include "support.hpp"

using namespace outbreak;

namespace {

// Minimum boundary/size over the window by plain subset enumeration.
Ratio brute_expansion(const Graph& g, std::size_t lo, std::size_t hi, ExpansionMode mode) {
  const std::size_t n = g.num_vertices();
  const auto a = testing::adjacency(g);
  Ratio best{1, 0};  // +infinity
  for (std::uint32_t bits = 1; bits < (1u << n); ++bits) {
    const auto size = static_cast<std::size_t>(std::popcount(bits));
    if (size < lo || size > hi) continue;
    std::uint64_t boundary = 0;
    for (std::size_t u = 0; u < n; ++u) {
      const bool in_u = bits >> u & 1;
      bool touched = false;
      for (std::size_t v = 0; v < n; ++v) {
        if (!a[u][v]) continue;
        const bool in_v = bits >> v & 1;
        if (mode == ExpansionMode::kEdge && in_u && !in_v) ++boundary;
        touched |= in_v;
      }
      if (mode == ExpansionMode::kVertex && !in_u && touched) ++boundary;
    }
    const Ratio r{boundary, size};
    if (best.denominator == 0 || r < best) best = r;
  }
  return best;
}

std::vector<Vertex> members(std::uint32_t bits, std::size_t n) {
  std::vector<Vertex> out;
  for (Vertex v = 0; v < n; ++v)
    if (bits >> v & 1) out.push_back(v);
  return out;
}

}  // namespace

TEST_CASE("expansion window") {
  CHECK(expansion_window(4, 0.25).lo == 1);
  CHECK(expansion_window(4, 0.25).hi == 2);
  CHECK(expansion_window(6, 1.0 / 3.0).lo == 2);
  CHECK(expansion_window(10, 0.3).lo == 3);
  CHECK(expansion_window(10, 0.3).hi == 5);
  CHECK_THROWS_AS(expansion_window(4, 0.5), std::invalid_argument);
  CHECK_THROWS_AS(expansion_window(4, 0.0), std::invalid_argument);
}

TEST_CASE("exact expansion reference values") {
  const auto c4 = expansion_exact(testing::cycle(4), 0.25, ExpansionMode::kEdge);
  CHECK(c4.value == Ratio{1, 1});
  CHECK(c4.witness.size() == 2);
  CHECK(c4.exact);

  // K4 with |A| in {1, 2}: a pair has 4 cut edges, a singleton 3.
  const auto k4 = expansion_exact(testing::complete(4), 0.25, ExpansionMode::kEdge);
  CHECK(k4.value == Ratio{2, 1});
  CHECK(k4.witness.size() == 2);

  const auto joined = expansion_exact(testing::joined_triangles(), 1.0 / 3.0, ExpansionMode::kEdge);
  CHECK(joined.value == Ratio{1, 3});
  CHECK(joined.witness.size() == 3);
}

TEST_CASE("exact expansion matches brute force and the witness attains it") {
  std::mt19937_64 rng(21);
  for (int round = 0; round < 150; ++round) {
    const std::size_t n = 2 + round % 10;
    const Graph g = testing::random_graph(n, 0.2 + 0.1 * (round % 5), rng);
    const double eps = (round % 3 == 0) ? 0.1 : (round % 3 == 1 ? 0.25 : 0.4);
    if (std::ceil(eps * n) > static_cast<double>(n / 2)) {
      CHECK_THROWS_AS(expansion_exact(g, eps, ExpansionMode::kEdge), std::invalid_argument);
      continue;
    }
    const auto window = expansion_window(n, eps);
    for (auto mode : {ExpansionMode::kEdge, ExpansionMode::kVertex}) {
      const auto report = expansion_exact(g, eps, mode);
      CHECK(report.value == brute_expansion(g, window.lo, window.hi, mode));
      REQUIRE(report.witness.size() >= window.lo);
      REQUIRE(report.witness.size() <= window.hi);
      const std::size_t b =
          mode == ExpansionMode::kEdge ? edge_boundary(g, report.witness) : vertex_boundary(g, report.witness);
      CHECK(Ratio{b, report.witness.size()} == report.value);
    }
  }
}

TEST_CASE("exact expansion refuses graphs above the cap") {
  CHECK_THROWS_AS(expansion_exact(testing::cycle(21), 0.25, ExpansionMode::kEdge), ExpansionCapError);
  CHECK_NOTHROW(expansion_exact(testing::cycle(12), 0.25, ExpansionMode::kEdge, 12));
  CHECK_THROWS_AS(expansion_exact(testing::cycle(12), 0.25, ExpansionMode::kEdge, 11), ExpansionCapError);
}

TEST_CASE("heuristic is feasible and never beats the exact minimum") {
  std::mt19937_64 rng(4);
  for (int round = 0; round < 40; ++round) {
    const std::size_t n = 6 + round % 10;
    const Graph g = testing::random_graph(n, 0.35, rng);
    for (auto mode : {ExpansionMode::kEdge, ExpansionMode::kVertex}) {
      const auto exact = expansion_exact(g, 0.25, mode);
      const auto heur = expansion_heuristic(g, 0.25, mode, 200, round);
      CHECK_FALSE(heur.exact);
      CHECK(heur.value >= exact.value);
      const auto window = expansion_window(n, 0.25);
      CHECK(heur.witness.size() >= window.lo);
      CHECK(heur.witness.size() <= window.hi);
      const std::size_t b =
          mode == ExpansionMode::kEdge ? edge_boundary(g, heur.witness) : vertex_boundary(g, heur.witness);
      CHECK(Ratio{b, heur.witness.size()} == heur.value);
    }
  }
  // A generous budget on a small graph finds the optimum.
  const auto full = expansion_heuristic(testing::joined_triangles(), 1.0 / 3.0, ExpansionMode::kEdge, 1 << 12);
  CHECK(full.value == Ratio{1, 3});
}

TEST_CASE("heuristic finds the planted cut on two joined cliques") {
  std::vector<Edge> e;
  for (Vertex i = 0; i < 30; ++i)
    for (Vertex j = i + 1; j < 30; ++j) {
      e.push_back({i, j});
      e.push_back({i + 30, j + 30});
    }
  e.push_back({0, 30});
  const Graph g = testing::make(60, e);
  const auto r = expansion_heuristic(g, 0.25, ExpansionMode::kEdge, 5000, 1);
  CHECK(r.value == Ratio{1, 30});
}

TEST_CASE("heuristic finds the single bridge between two regular blocks") {
  const auto gg = gen_two_block(3, 400, 8);
  const auto r = expansion_heuristic(gg.graph, 0.25, ExpansionMode::kEdge, 20000, 2);
  CHECK(r.value == Ratio{1, 200});
  const auto edge = gg.graph.edge(*gg.bridge);
  CHECK(std::count(r.witness.begin(), r.witness.end(), edge.u) + std::count(r.witness.begin(), r.witness.end(), edge.v) == 1);
}

TEST_CASE("vertex and edge boundaries bracket each other") {
  // delta_out(A) <= e(A, A^c) <= maxdeg * delta_out(A).
  std::mt19937_64 rng(17);
  for (int round = 0; round < 2000; ++round) {
    const std::size_t n = 2 + round % 11;
    const Graph g = testing::random_graph(n, 0.3, rng);
    const auto set = members(static_cast<std::uint32_t>(rng() % (1u << n)), n);
    const auto e = edge_boundary(g, set);
    const auto v = vertex_boundary(g, set);
    CHECK(v <= e);
    CHECK(e <= g.max_degree() * v);
  }
}
