#include <set>
#include <sstream>

#include "doctest.h"
#include "outbreak/components.hpp"
#include "outbreak/graph.hpp"
#include "outbreak/rng.hpp"
#include "support.hpp"

using namespace outbreak;

TEST_CASE("derive_seed matches the documented recipe") {
  // Reference values from an independent implementation of
  // mix64(FNV-1a(le64(master) || name || le64(index))).
  CHECK(fnv1a64("") == 0xcbf29ce484222325ULL);
  CHECK(fnv1a64("abc") == 0xe71fa2190541574bULL);
  CHECK(derive_seed(0, "trial", 0) == 0xb0ba00c1c740c324ULL);
  CHECK(derive_seed(7, "trial", 3) == 0x5fe4e82bad28bc74ULL);
  CHECK(derive_seed(42, "histogram", 0) == 0x26ec011ea0437ab6ULL);
  CHECK(derive_seed(~0ULL, "query", 123456789) == 0x560663c298ee4083ULL);
  const Seed s = derive_seed(7, "trial", 3);
  CHECK(edge_uniform(s, 0) == 0.9955097801213642);
  CHECK(edge_uniform(s, 1) == 0.3322435043241606);
  CHECK(edge_uniform(s, 2) == 0.1410378704746672);
}

TEST_CASE("Rng bounded draws stay in range and cover it") {
  Rng rng(5);
  std::vector<int> hits(7, 0);
  for (int i = 0; i < 7000; ++i) {
    const auto x = rng.below(7);
    REQUIRE(x < 7);
    ++hits[x];
  }
  for (int h : hits) CHECK(h > 800);
  for (int i = 0; i < 1000; ++i) {
    const double u = rng.uniform();
    CHECK((u >= 0.0 && u < 1.0));
  }
}

TEST_CASE("build_graph canonicalizes") {
  const Graph g = testing::make(4, {{1, 0}, {0, 1}, {2, 3}, {3, 2}, {1, 2}});
  CHECK(g.num_vertices() == 4);
  CHECK(g.num_edges() == 3);
  for (auto e : g.edges()) CHECK(e.u < e.v);
  CHECK(std::is_sorted(g.edges().begin(), g.edges().end()));
  CHECK(g.degree(1) == 2);
  CHECK(g.find_edge(2, 1).has_value());
  CHECK_FALSE(g.find_edge(0, 3).has_value());
  for (Vertex v = 0; v < 4; ++v) {
    const auto nb = g.neighbors(v);
    CHECK(std::is_sorted(nb.begin(), nb.end()));
    for (std::size_t i = 0; i < nb.size(); ++i) {
      const Edge e = g.edge(g.incident_edges(v)[i]);
      CHECK(((e.u == v && e.v == nb[i]) || (e.v == v && e.u == nb[i])));
    }
  }
}

TEST_CASE("build_graph rejects self-loops and bad endpoints with the edge") {
  try {
    (void)testing::make(1, {{0, 0}});
    FAIL("no throw");
  } catch (const GraphError& e) {
    CHECK(e.edge() == Edge{0, 0});
  }
  CHECK_THROWS_AS(testing::make(3, {{0, 3}}), GraphError);
  const Graph empty = testing::make(0, {});
  CHECK(empty.num_vertices() == 0);
}

TEST_CASE("check_graphical agrees with exhaustive realization") {
  for (std::size_t n = 1; n <= 5; ++n) {
    std::set<std::vector<std::size_t>> realizable;
    for (const auto& g : testing::all_labeled_graphs(n)) realizable.insert(g.degree_sequence().degrees);
    std::vector<std::size_t> d(n, 0);
    // All sequences with entries in [0, n].
    for (;;) {
      CHECK(check_graphical(DegreeSequence{d}) == realizable.contains(d));
      std::size_t i = 0;
      while (i < n && d[i] == n) d[i++] = 0;
      if (i == n) break;
      ++d[i];
    }
  }
  CHECK(check_graphical(DegreeSequence{{3, 3, 3, 3}}));
  CHECK_FALSE(check_graphical(DegreeSequence{{3, 3, 1, 1}}));
  CHECK_FALSE(check_graphical(DegreeSequence{{1, 1, 1}}));
}

TEST_CASE("components match dense reachability") {
  std::mt19937_64 rng(11);
  for (int round = 0; round < 200; ++round) {
    const Graph g = testing::random_graph(1 + round % 12, 0.3, rng);
    std::vector<bool> bits(g.num_edges());
    for (std::size_t e = 0; e < bits.size(); ++e) bits[e] = rng() & 1;
    const EdgeMask mask{bits, 0.5, 0, 0};
    const auto stats = components(g, mask);
    const auto a = testing::adjacency(g, bits);
    std::size_t total = 0;
    for (auto s : stats.sizes) total += s;
    CHECK(total == g.num_vertices());
    CHECK(std::is_sorted(stats.sizes.rbegin(), stats.sizes.rend()));
    for (Vertex v = 0; v < g.num_vertices(); ++v) {
      const auto seen = testing::reach(a, {v});
      CHECK(stats.size_of(v) == static_cast<std::size_t>(std::count(seen.begin(), seen.end(), true)));
      for (Vertex u = 0; u < g.num_vertices(); ++u) CHECK((stats.labels[u] == stats.labels[v]) == seen[u]);
    }
    CHECK(stats.giant_fraction == doctest::Approx(double(stats.sizes[0]) / double(g.num_vertices())));
  }
}

TEST_CASE("components examples") {
  const Graph g = testing::make(5, {{0, 1}, {1, 2}, {3, 4}});
  const auto stats = components(g, EdgeMask::all_open(3));
  CHECK(stats.sizes == std::vector<std::size_t>{3, 2});
  CHECK(stats.giant_fraction == doctest::Approx(0.6));
  const auto closed = components(g, EdgeMask::all_closed(3));
  CHECK(closed.sizes == std::vector<std::size_t>(5, 1));
  CHECK(closed.labels[0] == 0);  // ties go to the smallest vertex
  CHECK_THROWS_AS(components(g, EdgeMask::all_open(2)), std::invalid_argument);
}

TEST_CASE("bfs_ball matches all-pairs distances") {
  std::mt19937_64 rng(3);
  for (int round = 0; round < 100; ++round) {
    const Graph g = testing::random_graph(2 + round % 10, 0.25, rng);
    const auto d = testing::all_pairs(g);
    for (Vertex c = 0; c < g.num_vertices(); ++c) {
      for (std::uint32_t r = 0; r <= 4; ++r) {
        const Ball ball = bfs_ball(g, c, r);
        CHECK(ball.vertices.front() == c);
        std::size_t expected = 0;
        for (Vertex u = 0; u < g.num_vertices(); ++u) expected += d[c][u] >= 0 && d[c][u] <= static_cast<int>(r);
        CHECK(ball.vertices.size() == expected);
        for (std::size_t i = 0; i < ball.vertices.size(); ++i) {
          CHECK(static_cast<int>(ball.distance[i]) == d[c][ball.vertices[i]]);
          if (i > 0) CHECK(ball.distance[i - 1] <= ball.distance[i]);
        }
      }
    }
  }
  const Ball b = bfs_ball(testing::path(5), 0, 2);
  CHECK(b.vertices == std::vector<Vertex>{0, 1, 2});
}

TEST_CASE("boundaries match brute force") {
  std::mt19937_64 rng(9);
  for (int round = 0; round < 300; ++round) {
    const std::size_t n = 2 + round % 9;
    const Graph g = testing::random_graph(n, 0.35, rng);
    std::vector<Vertex> set;
    std::vector<bool> in(n, false);
    for (Vertex v = 0; v < n; ++v) {
      if (rng() & 1) {
        set.push_back(v);
        in[v] = true;
      }
    }
    std::shuffle(set.begin(), set.end(), rng);
    const auto a = testing::adjacency(g);
    std::size_t cut = 0, outer = 0;
    for (Vertex u = 0; u < n; ++u) {
      bool touches = false;
      for (Vertex v = 0; v < n; ++v) {
        if (a[u][v] && in[u] && !in[v]) ++cut;
        touches |= a[u][v] && in[v];
      }
      outer += !in[u] && touches;
    }
    CHECK(edge_boundary(g, set) == cut);
    CHECK(vertex_boundary(g, set) == outer);
  }
  const Graph c4 = testing::cycle(4);
  const std::vector<Vertex> pair{0, 1};
  CHECK(edge_boundary(c4, pair) == 2);
  CHECK(vertex_boundary(c4, pair) == 2);
}

TEST_CASE("edge list round trip keeps isolated vertices") {
  const Graph g = testing::make(6, {{0, 1}, {2, 4}});
  std::stringstream buffer;
  write_edge_list(buffer, g);
  const Graph back = read_edge_list(buffer);
  CHECK(back.num_vertices() == 6);
  CHECK(std::vector<Edge>(back.edges().begin(), back.edges().end()) ==
        std::vector<Edge>(g.edges().begin(), g.edges().end()));
  std::stringstream plain("# comment\n0 1\n1 2\n");
  CHECK(read_edge_list(plain).num_vertices() == 3);
}
