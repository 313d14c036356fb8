#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace outbreak {

using Vertex = std::uint32_t;
using EdgeId = std::uint32_t;

struct Edge {
  Vertex u = 0;
  Vertex v = 0;
  friend bool operator==(const Edge&, const Edge&) = default;
  friend auto operator<=>(const Edge&, const Edge&) = default;
};

// Raised for malformed graph input; carries the offending edge.
class GraphError : public std::invalid_argument {
 public:
  GraphError(const std::string& what, Edge edge)
      : std::invalid_argument(what), edge_(edge) {}
  Edge edge() const noexcept { return edge_; }

 private:
  Edge edge_;
};

struct DegreeSequence {
  std::vector<std::size_t> degrees;

  std::size_t size() const noexcept { return degrees.size(); }
  std::size_t total() const noexcept;
  std::size_t max() const noexcept;
};

// Erdős-Gallai test plus even degree sum.
bool check_graphical(const DegreeSequence& d);

/// Immutable simple undirected graph in compressed adjacency form.
///
/// Edges are stored in canonical order: lexicographic (u, v) with u < v.
/// An edge's position in that order is its EdgeId, which is what EdgeMask
/// bits index. Neighbor lists are sorted and carry the id of the connecting
/// edge alongside each neighbor.
class Graph {
 public:
  Graph() = default;

  // Deduplicates and canonicalizes. Throws GraphError on self-loops or
  // endpoints outside [0, n).
  static Graph from_edges(std::size_t n, std::span<const Edge> edges);

  std::size_t num_vertices() const noexcept { return offsets_.empty() ? 0 : offsets_.size() - 1; }
  std::size_t num_edges() const noexcept { return edges_.size(); }

  std::span<const Edge> edges() const noexcept { return edges_; }
  const Edge& edge(EdgeId e) const { return edges_[e]; }

  std::span<const Vertex> neighbors(Vertex v) const noexcept {
    return {adjacency_.data() + offsets_[v], adjacency_.data() + offsets_[v + 1]};
  }
  std::span<const EdgeId> incident_edges(Vertex v) const noexcept {
    return {incident_.data() + offsets_[v], incident_.data() + offsets_[v + 1]};
  }
  std::size_t degree(Vertex v) const noexcept { return offsets_[v + 1] - offsets_[v]; }
  std::size_t max_degree() const noexcept { return max_degree_; }
  std::span<const std::size_t> offsets() const noexcept { return offsets_; }

  std::optional<EdgeId> find_edge(Vertex a, Vertex b) const;
  DegreeSequence degree_sequence() const;

 private:
  std::vector<Edge> edges_;
  std::vector<std::size_t> offsets_;
  std::vector<Vertex> adjacency_;
  std::vector<EdgeId> incident_;
  std::size_t max_degree_ = 0;
};

inline Graph build_graph(std::span<const Edge> edges, std::size_t n) {
  return Graph::from_edges(n, edges);
}

// Edge-list text: one "u v" pair per line, 0-based, '#' starts a comment.
// A "# n <count>" comment line fixes the vertex count (so isolated trailing
// vertices survive a round trip); otherwise n = max endpoint + 1.
Graph read_edge_list(std::istream& in);
Graph read_edge_list_file(const std::string& path);
void write_edge_list(std::ostream& out, const Graph& g);

struct Ball {
  std::vector<Vertex> vertices;         // BFS order, center first
  std::vector<std::uint32_t> distance;  // parallel to vertices
};

Ball bfs_ball(const Graph& g, Vertex center, std::uint32_t radius);

// Edge count between A and its complement. A may list vertices in any order
// but must not repeat them.
std::size_t edge_boundary(const Graph& g, std::span<const Vertex> set);

// Number of vertices outside A with at least one neighbor in A.
std::size_t vertex_boundary(const Graph& g, std::span<const Vertex> set);

}  // namespace outbreak
