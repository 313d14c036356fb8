#include "outbreak/graph.hpp"

#include <algorithm>
#include <fstream>
#include <istream>
#include <numeric>
#include <ostream>
#include <sstream>

#include "outbreak/components.hpp"

namespace outbreak {

std::size_t DegreeSequence::total() const noexcept {
  return std::accumulate(degrees.begin(), degrees.end(), std::size_t{0});
}

std::size_t DegreeSequence::max() const noexcept {
  return degrees.empty() ? 0 : *std::max_element(degrees.begin(), degrees.end());
}

bool check_graphical(const DegreeSequence& d) {
  if (d.total() % 2 != 0) return false;
  const std::size_t n = d.size();
  std::vector<std::size_t> sorted = d.degrees;
  std::sort(sorted.begin(), sorted.end(), std::greater<>());
  if (n > 0 && sorted.front() >= n) return false;

  // sum_{i<=k} d_i <= k(k-1) + sum_{i>k} min(d_i, k) for every k.
  // Suffix sums of min(d_i, k) are found with a pointer into the sorted
  // sequence, since the d_i > k prefix shrinks as k grows.
  std::vector<unsigned long long> suffix(n + 1, 0);
  for (std::size_t i = n; i-- > 0;) suffix[i] = suffix[i + 1] + sorted[i];
  unsigned long long left = 0;
  std::size_t boundary = n;  // first index with sorted[index] <= k
  for (std::size_t k = 1; k <= n; ++k) {
    left += sorted[k - 1];
    while (boundary > 0 && sorted[boundary - 1] <= k) --boundary;
    const std::size_t start = std::max(boundary, k);
    const unsigned long long big = start > k ? static_cast<unsigned long long>(start - k) * k : 0;
    const unsigned long long right =
        static_cast<unsigned long long>(k) * (k - 1) + big + suffix[start];
    if (left > right) return false;
  }
  return true;
}

Graph Graph::from_edges(std::size_t n, std::span<const Edge> edges) {
  Graph g;
  g.edges_.reserve(edges.size());
  for (const Edge& e : edges) {
    if (e.u >= n || e.v >= n) {
      throw GraphError("edge (" + std::to_string(e.u) + "," + std::to_string(e.v) +
                           ") has an endpoint outside [0," + std::to_string(n) + ")",
                       e);
    }
    if (e.u == e.v) {
      throw GraphError("self-loop at vertex " + std::to_string(e.u), e);
    }
    g.edges_.push_back(e.u < e.v ? e : Edge{e.v, e.u});
  }
  std::sort(g.edges_.begin(), g.edges_.end());
  g.edges_.erase(std::unique(g.edges_.begin(), g.edges_.end()), g.edges_.end());

  g.offsets_.assign(n + 1, 0);
  for (const Edge& e : g.edges_) {
    ++g.offsets_[e.u + 1];
    ++g.offsets_[e.v + 1];
  }
  std::partial_sum(g.offsets_.begin(), g.offsets_.end(), g.offsets_.begin());
  g.adjacency_.resize(2 * g.edges_.size());
  g.incident_.resize(2 * g.edges_.size());
  std::vector<std::size_t> cursor(g.offsets_.begin(), g.offsets_.end() - 1);
  // Edges are sorted by (u, v), so filling in edge order leaves every
  // neighbor list sorted: for a vertex x, neighbors w < x arrive through
  // edges (w, x) ordered by w, all before edges (x, w') ordered by w'.
  for (EdgeId id = 0; id < g.edges_.size(); ++id) {
    const Edge& e = g.edges_[id];
    g.adjacency_[cursor[e.u]] = e.v;
    g.incident_[cursor[e.u]++] = id;
    g.adjacency_[cursor[e.v]] = e.u;
    g.incident_[cursor[e.v]++] = id;
  }
  for (std::size_t v = 0; v < n; ++v) {
    g.max_degree_ = std::max(g.max_degree_, g.offsets_[v + 1] - g.offsets_[v]);
  }
  return g;
}

std::optional<EdgeId> Graph::find_edge(Vertex a, Vertex b) const {
  if (a >= num_vertices() || b >= num_vertices()) return std::nullopt;
  auto nbrs = neighbors(a);
  auto it = std::lower_bound(nbrs.begin(), nbrs.end(), b);
  if (it == nbrs.end() || *it != b) return std::nullopt;
  return incident_[offsets_[a] + static_cast<std::size_t>(it - nbrs.begin())];
}

DegreeSequence Graph::degree_sequence() const {
  DegreeSequence d;
  d.degrees.resize(num_vertices());
  for (Vertex v = 0; v < num_vertices(); ++v) d.degrees[v] = degree(v);
  return d;
}

Graph read_edge_list(std::istream& in) {
  std::vector<Edge> edges;
  std::optional<std::size_t> declared_n;
  std::size_t inferred_n = 0;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) {
      std::istringstream comment(line.substr(hash + 1));
      std::string key;
      std::size_t value = 0;
      if (comment >> key && key == "n" && comment >> value) declared_n = value;
      line.resize(hash);
    }
    std::istringstream fields(line);
    long long u = 0, v = 0;
    if (!(fields >> u)) continue;
    if (!(fields >> v) || u < 0 || v < 0) {
      throw std::invalid_argument("edge list line " + std::to_string(line_no) +
                                  ": expected two non-negative vertex ids");
    }
    edges.push_back({static_cast<Vertex>(u), static_cast<Vertex>(v)});
    inferred_n = std::max<std::size_t>(inferred_n, static_cast<std::size_t>(std::max(u, v)) + 1);
  }
  return Graph::from_edges(declared_n.value_or(inferred_n), edges);
}

Graph read_edge_list_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open edge list '" + path + "'");
  return read_edge_list(in);
}

void write_edge_list(std::ostream& out, const Graph& g) {
  out << "# n " << g.num_vertices() << "\n# m " << g.num_edges() << "\n";
  for (const Edge& e : g.edges()) out << e.u << ' ' << e.v << '\n';
}

Ball bfs_ball(const Graph& g, Vertex center, std::uint32_t radius) {
  if (center >= g.num_vertices()) throw std::out_of_range("bfs_ball: center out of range");
  Ball ball;
  std::vector<bool> seen(g.num_vertices(), false);
  ball.vertices.push_back(center);
  ball.distance.push_back(0);
  seen[center] = true;
  for (std::size_t head = 0; head < ball.vertices.size(); ++head) {
    const std::uint32_t d = ball.distance[head];
    if (d == radius) continue;
    for (Vertex w : g.neighbors(ball.vertices[head])) {
      if (seen[w]) continue;
      seen[w] = true;
      ball.vertices.push_back(w);
      ball.distance.push_back(d + 1);
    }
  }
  return ball;
}

namespace {

std::vector<bool> membership(const Graph& g, std::span<const Vertex> set) {
  std::vector<bool> in(g.num_vertices(), false);
  for (Vertex v : set) {
    if (v >= g.num_vertices()) throw std::out_of_range("vertex set contains an out-of-range id");
    in[v] = true;
  }
  return in;
}

}  // namespace

std::size_t edge_boundary(const Graph& g, std::span<const Vertex> set) {
  const auto in = membership(g, set);
  std::size_t count = 0;
  for (const Edge& e : g.edges()) count += in[e.u] != in[e.v];
  return count;
}

std::size_t vertex_boundary(const Graph& g, std::span<const Vertex> set) {
  const auto in = membership(g, set);
  std::vector<bool> hit(g.num_vertices(), false);
  std::size_t count = 0;
  for (Vertex v : set) {
    for (Vertex w : g.neighbors(v)) {
      if (!in[w] && !hit[w]) {
        hit[w] = true;
        ++count;
      }
    }
  }
  return count;
}

std::size_t EdgeMask::count_open() const {
  return static_cast<std::size_t>(std::count(bits.begin(), bits.end(), true));
}

namespace {

ComponentStats finalize(const Graph& g, UnionFind& uf) {
  const std::size_t n = g.num_vertices();
  ComponentStats stats;
  stats.labels.assign(n, 0);
  // Roots in order of their smallest vertex.
  std::vector<std::uint32_t> root_index(n, UINT32_MAX);
  std::vector<std::size_t> raw_sizes;
  for (Vertex v = 0; v < n; ++v) {
    const auto r = uf.find(v);
    if (root_index[r] == UINT32_MAX) {
      root_index[r] = static_cast<std::uint32_t>(raw_sizes.size());
      raw_sizes.push_back(uf.component_size(r));
    }
    stats.labels[v] = root_index[r];
  }
  std::vector<std::uint32_t> order(raw_sizes.size());
  std::iota(order.begin(), order.end(), 0u);
  std::stable_sort(order.begin(), order.end(),
                   [&](auto a, auto b) { return raw_sizes[a] > raw_sizes[b]; });
  std::vector<std::uint32_t> rank(order.size());
  stats.sizes.resize(order.size());
  for (std::uint32_t i = 0; i < order.size(); ++i) {
    rank[order[i]] = i;
    stats.sizes[i] = raw_sizes[order[i]];
  }
  for (auto& label : stats.labels) label = rank[label];
  stats.giant_fraction = n == 0 ? 0.0 : static_cast<double>(stats.giant_size()) / static_cast<double>(n);
  return stats;
}

}  // namespace

ComponentStats components(const Graph& g, const EdgeMask& mask) {
  if (mask.size() != g.num_edges()) {
    throw std::invalid_argument("edge mask has " + std::to_string(mask.size()) +
                                " bits but the graph has " + std::to_string(g.num_edges()) +
                                " edges");
  }
  UnionFind uf(g.num_vertices());
  const auto edges = g.edges();
  for (EdgeId e = 0; e < edges.size(); ++e) {
    if (mask.bits[e]) uf.unite(edges[e].u, edges[e].v);
  }
  return finalize(g, uf);
}

ComponentStats components(const Graph& g) {
  UnionFind uf(g.num_vertices());
  for (const Edge& e : g.edges()) uf.unite(e.u, e.v);
  return finalize(g, uf);
}

}  // namespace outbreak
