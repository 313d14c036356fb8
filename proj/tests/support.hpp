#pragma once

// Brute-force reference implementations used as independent oracles. They
// deliberately avoid the library's CSR adjacency and union-find: everything
// here works on dense adjacency matrices.

#include <algorithm>
#include <cstdint>
#include <map>
#include <queue>
#include <random>
#include <vector>

#include "outbreak/graph.hpp"

namespace testing {

using outbreak::Edge;
using outbreak::Graph;
using outbreak::Vertex;

using Matrix = std::vector<std::vector<bool>>;

inline Graph make(std::size_t n, std::vector<Edge> edges) { return Graph::from_edges(n, edges); }

inline Graph cycle(std::size_t n) {
  std::vector<Edge> e;
  for (Vertex i = 0; i < n; ++i) e.push_back({i, static_cast<Vertex>((i + 1) % n)});
  return make(n, e);
}

inline Graph path(std::size_t n) {
  std::vector<Edge> e;
  for (Vertex i = 0; i + 1 < n; ++i) e.push_back({i, i + 1});
  return make(n, e);
}

inline Graph complete(std::size_t n) {
  std::vector<Edge> e;
  for (Vertex i = 0; i < n; ++i)
    for (Vertex j = i + 1; j < n; ++j) e.push_back({i, j});
  return make(n, e);
}

inline Graph star(std::size_t n) {
  std::vector<Edge> e;
  for (Vertex i = 1; i < n; ++i) e.push_back({0, i});
  return make(n, e);
}

// Two triangles joined by the edge 2-3.
inline Graph joined_triangles() { return make(6, {{0, 1}, {1, 2}, {0, 2}, {3, 4}, {4, 5}, {3, 5}, {2, 3}}); }

inline Graph random_graph(std::size_t n, double density, std::mt19937_64& rng) {
  std::bernoulli_distribution coin(density);
  std::vector<Edge> e;
  for (Vertex i = 0; i < n; ++i)
    for (Vertex j = i + 1; j < n; ++j)
      if (coin(rng)) e.push_back({i, j});
  return make(n, e);
}

// Every labeled graph on n vertices, indexed by a bitmask over the C(n,2)
// vertex pairs.
inline std::vector<Graph> all_labeled_graphs(std::size_t n) {
  std::vector<Edge> pairs;
  for (Vertex i = 0; i < n; ++i)
    for (Vertex j = i + 1; j < n; ++j) pairs.push_back({i, j});
  std::vector<Graph> out;
  for (std::uint32_t bits = 0; bits < (1u << pairs.size()); ++bits) {
    std::vector<Edge> e;
    for (std::size_t k = 0; k < pairs.size(); ++k)
      if (bits >> k & 1) e.push_back(pairs[k]);
    out.push_back(make(n, e));
  }
  return out;
}

inline Matrix adjacency(const Graph& g, const std::vector<bool>& open) {
  Matrix a(g.num_vertices(), std::vector<bool>(g.num_vertices(), false));
  for (std::size_t e = 0; e < g.num_edges(); ++e) {
    if (!open[e]) continue;
    a[g.edge(e).u][g.edge(e).v] = a[g.edge(e).v][g.edge(e).u] = true;
  }
  return a;
}

inline Matrix adjacency(const Graph& g) { return adjacency(g, std::vector<bool>(g.num_edges(), true)); }

// Vertices reachable from any seed.
inline std::vector<bool> reach(const Matrix& a, const std::vector<Vertex>& seeds) {
  std::vector<bool> seen(a.size(), false);
  std::vector<Vertex> stack;
  for (Vertex s : seeds) {
    if (!seen[s]) stack.push_back(s);
    seen[s] = true;
  }
  while (!stack.empty()) {
    const Vertex x = stack.back();
    stack.pop_back();
    for (Vertex y = 0; y < a.size(); ++y) {
      if (a[x][y] && !seen[y]) {
        seen[y] = true;
        stack.push_back(y);
      }
    }
  }
  return seen;
}

// Floyd-Warshall; -1 for unreachable.
inline std::vector<std::vector<int>> all_pairs(const Graph& g) {
  const std::size_t n = g.num_vertices();
  const int inf = 1 << 28;
  std::vector<std::vector<int>> d(n, std::vector<int>(n, inf));
  const auto a = adjacency(g);
  for (std::size_t i = 0; i < n; ++i) {
    d[i][i] = 0;
    for (std::size_t j = 0; j < n; ++j)
      if (a[i][j]) d[i][j] = 1;
  }
  for (std::size_t k = 0; k < n; ++k)
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) d[i][j] = std::min(d[i][j], d[i][k] + d[k][j]);
  for (auto& row : d)
    for (auto& x : row)
      if (x == inf) x = -1;
  return d;
}

// Law of the number of vertices reachable from `seeds`, by enumerating every
// mask; p^open (1-p)^closed accumulated directly.
inline std::map<std::size_t, double> brute_outbreak_law(const Graph& g, const std::vector<Vertex>& seeds,
                                                        double p) {
  std::map<std::size_t, double> law;
  const std::size_t m = g.num_edges();
  for (std::uint64_t bits = 0; bits < (std::uint64_t{1} << m); ++bits) {
    std::vector<bool> open(m);
    double w = 1.0;
    for (std::size_t e = 0; e < m; ++e) {
      open[e] = bits >> e & 1;
      w *= open[e] ? p : 1.0 - p;
    }
    const auto seen = reach(adjacency(g, open), seeds);
    law[static_cast<std::size_t>(std::count(seen.begin(), seen.end(), true))] += w;
  }
  return law;
}

}  // namespace testing
