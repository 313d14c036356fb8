#include "outbreak/oracle.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <map>
#include <string>

#include "outbreak/components.hpp"
#include "outbreak/percolation.hpp"

namespace outbreak {

namespace {

void check_cap(const Graph& g) {
  if (g.num_edges() > kOracleEdgeCap) {
    throw OracleCapError("oracle: " + std::to_string(g.num_edges()) + " edges exceeds the enumeration cap of " +
                         std::to_string(kOracleEdgeCap));
  }
}

void check_vertex(const Graph& g, Vertex v) {
  if (v >= g.num_vertices()) throw std::out_of_range("oracle: vertex out of range");
}

// Neumaier-compensated sum of count * p^j (1-p)^(m-j).
double weigh(std::span<const std::uint64_t> counts, std::size_t m, double p) {
  double sum = 0.0, carry = 0.0;
  for (std::size_t j = 0; j < counts.size(); ++j) {
    if (counts[j] == 0) continue;
    const double term = static_cast<double>(counts[j]) * std::pow(p, static_cast<double>(j)) *
                        std::pow(1.0 - p, static_cast<double>(m - j));
    const double t = sum + term;
    carry += std::abs(sum) >= std::abs(term) ? (sum - t) + term : (term - t) + sum;
    sum = t;
  }
  return sum + carry;
}

template <typename Outcome>
ExactLaw enumerate(const Graph& g, double p, Outcome&& outcome) {
  check_cap(g);
  if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument("oracle: p must lie in [0, 1]");
  const std::size_t m = g.num_edges();
  std::map<std::size_t, std::vector<std::uint64_t>> table;
  UnionFind uf(g.num_vertices());
  for (std::uint64_t bits = 0; bits < (std::uint64_t{1} << m); ++bits) {
    uf = UnionFind(g.num_vertices());
    for (EdgeId e = 0; e < m; ++e) {
      if (bits >> e & 1) uf.unite(g.edge(e).u, g.edge(e).v);
    }
    auto& row = table[outcome(uf)];
    row.resize(m + 1, 0);
    ++row[static_cast<std::size_t>(std::popcount(bits))];
  }
  ExactLaw law;
  law.num_edges = m;
  law.p = p;
  for (auto& [value, row] : table) {
    law.support.push_back(value);
    law.counts.push_back(std::move(row));
  }
  law.probabilities = law.at(p);
  return law;
}

}  // namespace

std::vector<double> ExactLaw::at(double q) const {
  std::vector<double> out;
  out.reserve(counts.size());
  for (const auto& row : counts) out.push_back(weigh(row, num_edges, q));
  return out;
}

double ExactLaw::probability_of(std::size_t value) const {
  auto it = std::lower_bound(support.begin(), support.end(), value);
  if (it == support.end() || *it != value) return 0.0;
  return probabilities[static_cast<std::size_t>(it - support.begin())];
}

double ExactLaw::mean() const {
  double sum = 0.0;
  for (std::size_t i = 0; i < support.size(); ++i) sum += static_cast<double>(support[i]) * probabilities[i];
  return sum;
}

std::vector<Rational> ExactLaw::rational(std::int64_t numerator, std::int64_t denominator) const {
  if (denominator <= 0 || numerator < 0 || numerator > denominator) {
    throw std::invalid_argument("ExactLaw::rational: need 0 <= numerator <= denominator");
  }
  using boost::multiprecision::cpp_int;
  const cpp_int a = numerator, b = denominator, c = denominator - numerator;
  cpp_int scale = 1;
  for (std::size_t i = 0; i < num_edges; ++i) scale *= b;
  std::vector<Rational> out;
  for (const auto& row : counts) {
    cpp_int total = 0;
    for (std::size_t j = 0; j < row.size(); ++j) {
      if (row[j] == 0) continue;
      cpp_int term = row[j];
      for (std::size_t i = 0; i < j; ++i) term *= a;
      for (std::size_t i = j; i < num_edges; ++i) term *= c;
      total += term;
    }
    out.emplace_back(total, scale);
  }
  return out;
}

nlohmann::json ExactLaw::to_json() const {
  nlohmann::json j = nlohmann::json::object();
  for (std::size_t i = 0; i < support.size(); ++i) j[std::to_string(support[i])] = probabilities[i];
  return j;
}

ExactLaw exact_component_distribution(const Graph& g, Vertex v, double p) {
  check_vertex(g, v);
  return enumerate(g, p, [&](UnionFind& uf) { return uf.component_size(v); });
}

ExactLaw exact_outbreak_distribution(const Graph& g, std::span<const Vertex> seeds, double p) {
  if (seeds.empty()) throw std::invalid_argument("oracle: seed set must be non-empty");
  for (Vertex s : seeds) check_vertex(g, s);
  return enumerate(g, p, [&](UnionFind& uf) {
    std::vector<Vertex> roots;
    for (Vertex s : seeds) roots.push_back(uf.find(s));
    std::sort(roots.begin(), roots.end());
    roots.erase(std::unique(roots.begin(), roots.end()), roots.end());
    std::size_t total = 0;
    for (Vertex r : roots) total += uf.component_size(r);
    return total;
  });
}

ExactLaw exact_zeta_k_law(const Graph& g, Vertex v, std::uint32_t k, double p) {
  check_vertex(g, v);
  const auto dist = graph_distances(g, v);
  std::vector<Vertex> far;
  for (Vertex u = 0; u < g.num_vertices(); ++u) {
    if (dist[u] != UINT32_MAX && dist[u] >= k) far.push_back(u);
  }
  return enumerate(g, p, [&](UnionFind& uf) -> std::size_t {
    const Vertex root = uf.find(v);
    for (Vertex u : far) {
      if (uf.find(u) == root) return 1;
    }
    return 0;
  });
}

double exact_zeta_k(const Graph& g, Vertex v, std::uint32_t k, double p) {
  return exact_zeta_k_law(g, v, k, p).probability_of(1);
}

}  // namespace outbreak
