#pragma once

#include <cstddef>
#include <cstdint>
#include <numeric>
#include <vector>

#include "outbreak/graph.hpp"
#include "outbreak/rng.hpp"

namespace outbreak {

/// One bond-percolation realization over a graph's canonical edge ids.
struct EdgeMask {
  std::vector<bool> bits;
  double p = 0.0;
  Seed seed = 0;
  std::uint64_t trial_index = 0;

  std::size_t size() const noexcept { return bits.size(); }
  bool open(EdgeId e) const { return bits[e]; }
  std::size_t count_open() const;

  static EdgeMask all_open(std::size_t m) { return {std::vector<bool>(m, true), 1.0, 0, 0}; }
  static EdgeMask all_closed(std::size_t m) { return {std::vector<bool>(m, false), 0.0, 0, 0}; }
};

// Union by size with path halving.
class UnionFind {
 public:
  explicit UnionFind(std::size_t n) : parent_(n), size_(n, 1) {
    std::iota(parent_.begin(), parent_.end(), 0u);
  }

  std::uint32_t find(std::uint32_t x) {
    while (parent_[x] != x) {
      parent_[x] = parent_[parent_[x]];
      x = parent_[x];
    }
    return x;
  }

  bool unite(std::uint32_t a, std::uint32_t b) {
    a = find(a);
    b = find(b);
    if (a == b) return false;
    if (size_[a] < size_[b]) std::swap(a, b);
    parent_[b] = a;
    size_[a] += size_[b];
    return true;
  }

  std::size_t component_size(std::uint32_t x) { return size_[find(x)]; }

 private:
  std::vector<std::uint32_t> parent_;
  std::vector<std::size_t> size_;
};

/// Components of the subgraph of open edges.
///
/// Labels are ranks into `sizes`: label 0 is the largest component (ties go
/// to the component holding the smallest vertex), so giant membership is
/// `labels[v] == 0`.
struct ComponentStats {
  std::vector<std::uint32_t> labels;
  std::vector<std::size_t> sizes;  // descending
  double giant_fraction = 0.0;

  std::size_t giant_size() const noexcept { return sizes.empty() ? 0 : sizes.front(); }
  std::size_t size_of(Vertex v) const { return sizes[labels[v]]; }
};

// Throws std::invalid_argument when the mask length differs from m.
ComponentStats components(const Graph& g, const EdgeMask& mask);
ComponentStats components(const Graph& g);  // all edges open

}  // namespace outbreak
