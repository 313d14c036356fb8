#include "outbreak/expansion.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numeric>
#include <string>

namespace outbreak {

SizeWindow expansion_window(std::size_t n, double eps) {
  if (!(eps > 0.0 && eps < 0.5)) {
    throw std::invalid_argument("expansion: eps must lie in (0, 1/2)");
  }
  const double scaled = eps * static_cast<double>(n) - 1e-9;
  SizeWindow w{static_cast<std::size_t>(std::max(1.0, std::ceil(scaled))), n / 2};
  if (w.lo > w.hi) {
    throw std::invalid_argument("expansion: no admissible set size for n=" + std::to_string(n));
  }
  return w;
}

ExpansionReport expansion_exact(const Graph& g, double eps, ExpansionMode mode, std::size_t cap) {
  const std::size_t n = g.num_vertices();
  if (n > cap || n > 30) {
    throw ExpansionCapError("expansion_exact: n=" + std::to_string(n) + " exceeds the cap of " +
                            std::to_string(cap) + "; use expansion_heuristic");
  }
  const SizeWindow window = expansion_window(n, eps);

  std::vector<std::uint32_t> adj(n, 0);
  for (const Edge& e : g.edges()) {
    adj[e.u] |= 1u << e.v;
    adj[e.v] |= 1u << e.u;
  }
  const std::uint32_t full = n == 32 ? ~0u : (1u << n) - 1;

  ExpansionReport report{eps, mode, Ratio{1, 0}, {}, true};  // 1/0 acts as +infinity
  std::uint32_t best = 0;
  for (std::uint32_t set = 1; set <= full && set != 0; ++set) {
    const auto size = static_cast<std::size_t>(std::popcount(set));
    if (size < window.lo || size > window.hi) continue;
    std::uint64_t boundary = 0;
    if (mode == ExpansionMode::kEdge) {
      for (std::uint32_t rest = set; rest; rest &= rest - 1) {
        boundary += std::popcount(adj[std::countr_zero(rest)] & ~set);
      }
    } else {
      std::uint32_t reach = 0;
      for (std::uint32_t rest = set; rest; rest &= rest - 1) reach |= adj[std::countr_zero(rest)];
      boundary = std::popcount(reach & ~set);
    }
    const Ratio r{boundary, size};
    if (r < report.value) {
      report.value = r;
      best = set;
    }
  }
  for (Vertex v = 0; v < n; ++v) {
    if (best >> v & 1u) report.witness.push_back(v);
  }
  return report;
}

namespace {

// Incrementally maintained set with O(deg) membership updates for both
// boundary flavours.
class BoundaryTracker {
 public:
  explicit BoundaryTracker(const Graph& g)
      : g_(g), in_(g.num_vertices(), false), inside_neighbors_(g.num_vertices(), 0),
        position_(g.num_vertices(), 0) {}

  void add(Vertex v) {
    in_[v] = true;
    position_[v] = members_.size();
    members_.push_back(v);
    edge_boundary_ += g_.degree(v);
    edge_boundary_ -= 2 * inside_neighbors_[v];
    if (inside_neighbors_[v] > 0) --vertex_boundary_;
    for (Vertex w : g_.neighbors(v)) {
      if (++inside_neighbors_[w] == 1 && !in_[w]) ++vertex_boundary_;
    }
  }

  void remove(Vertex v) {
    const std::size_t pos = position_[v];
    members_[pos] = members_.back();
    position_[members_[pos]] = pos;
    members_.pop_back();
    in_[v] = false;
    edge_boundary_ += 2 * inside_neighbors_[v];
    edge_boundary_ -= g_.degree(v);
    for (Vertex w : g_.neighbors(v)) {
      if (--inside_neighbors_[w] == 0 && !in_[w]) --vertex_boundary_;
    }
    if (inside_neighbors_[v] > 0) ++vertex_boundary_;
  }

  bool contains(Vertex v) const { return in_[v]; }
  std::size_t size() const { return members_.size(); }
  const std::vector<Vertex>& members() const { return members_; }

  Ratio ratio(ExpansionMode mode) const {
    const std::uint64_t b = mode == ExpansionMode::kEdge ? edge_boundary_ : vertex_boundary_;
    return {b, members_.size()};
  }

 private:
  const Graph& g_;
  std::vector<bool> in_;
  std::vector<std::uint32_t> inside_neighbors_;
  std::vector<std::size_t> position_;
  std::vector<Vertex> members_;
  std::uint64_t edge_boundary_ = 0;
  std::uint64_t vertex_boundary_ = 0;
};

// Approximate Fiedler vector by power iteration on (2*maxdeg)I - L with the
// constant vector projected out.
std::vector<double> fiedler_vector(const Graph& g, std::size_t iterations, Rng& rng) {
  const std::size_t n = g.num_vertices();
  std::vector<double> x(n), y(n);
  for (auto& xi : x) xi = rng.uniform() - 0.5;
  const double shift = 2.0 * static_cast<double>(std::max<std::size_t>(g.max_degree(), 1));
  auto normalize = [&](std::vector<double>& v) {
    const double mean = std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(n);
    double norm = 0.0;
    for (auto& vi : v) {
      vi -= mean;
      norm += vi * vi;
    }
    norm = std::sqrt(norm);
    if (norm > 0) {
      for (auto& vi : v) vi /= norm;
    }
  };
  normalize(x);
  for (std::size_t it = 0; it < iterations; ++it) {
    for (Vertex v = 0; v < n; ++v) {
      double acc = (shift - static_cast<double>(g.degree(v))) * x[v];
      for (Vertex w : g.neighbors(v)) acc += x[w];
      y[v] = acc;
    }
    normalize(y);
    std::swap(x, y);
  }
  return x;
}

void sweep(const Graph& g, std::span<const Vertex> order, SizeWindow window, ExpansionMode mode,
           Ratio& best_value, std::vector<Vertex>& best_set) {
  BoundaryTracker tracker(g);
  for (std::size_t i = 0; i < window.hi; ++i) {
    tracker.add(order[i]);
    if (tracker.size() >= window.lo) {
      const Ratio r = tracker.ratio(mode);
      if (r < best_value) {
        best_value = r;
        best_set.assign(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(i + 1));
      }
    }
  }
}

}  // namespace

ExpansionReport expansion_heuristic(const Graph& g, double eps, ExpansionMode mode,
                                    std::uint64_t budget, Seed seed) {
  const std::size_t n = g.num_vertices();
  if (n <= kExactExpansionCap && budget >= (std::uint64_t{1} << n)) {
    auto report = expansion_exact(g, eps, mode);
    report.exact = false;
    return report;
  }
  const SizeWindow window = expansion_window(n, eps);
  Rng rng(seed);

  Ratio best{1, 0};
  std::vector<Vertex> best_set;

  const std::size_t power_iterations =
      static_cast<std::size_t>(std::min<std::uint64_t>(std::max<std::uint64_t>(budget / 4, 20), 2000));
  const auto fiedler = fiedler_vector(g, power_iterations, rng);
  std::vector<Vertex> order(n);
  std::iota(order.begin(), order.end(), 0u);
  std::stable_sort(order.begin(), order.end(),
                   [&](Vertex a, Vertex b) { return fiedler[a] < fiedler[b]; });
  sweep(g, order, window, mode, best, best_set);
  std::reverse(order.begin(), order.end());
  sweep(g, order, window, mode, best, best_set);

  // Local search from the sweep witness: add, drop or swap one vertex when
  // the result stays in the window and does not worsen the ratio.
  BoundaryTracker tracker(g);
  for (Vertex v : best_set) tracker.add(v);
  Ratio current = tracker.ratio(mode);
  auto random_outside_neighbor = [&]() -> std::optional<Vertex> {
    const auto& members = tracker.members();
    for (int attempt = 0; attempt < 8; ++attempt) {
      const Vertex anchor = members[rng.below(members.size())];
      const auto nbrs = g.neighbors(anchor);
      if (nbrs.empty()) continue;
      const Vertex w = nbrs[rng.below(nbrs.size())];
      if (!tracker.contains(w)) return w;
    }
    const auto w = static_cast<Vertex>(rng.below(n));
    if (tracker.contains(w)) return std::nullopt;
    return w;
  };
  for (std::uint64_t step = 0; step < budget; ++step) {
    const auto kind = rng.below(3);
    if (kind == 0 && tracker.size() < window.hi) {
      auto w = random_outside_neighbor();
      if (!w) continue;
      tracker.add(*w);
      const Ratio r = tracker.ratio(mode);
      if (r <= current) current = r; else tracker.remove(*w);
    } else if (kind == 1 && tracker.size() > window.lo) {
      const Vertex v = tracker.members()[rng.below(tracker.size())];
      tracker.remove(v);
      const Ratio r = tracker.ratio(mode);
      if (r <= current) current = r; else tracker.add(v);
    } else {
      auto w = random_outside_neighbor();
      if (!w) continue;
      const Vertex v = tracker.members()[rng.below(tracker.size())];
      tracker.remove(v);
      tracker.add(*w);
      const Ratio r = tracker.ratio(mode);
      if (r <= current) {
        current = r;
      } else {
        tracker.remove(*w);
        tracker.add(v);
      }
    }
    if (current < best) {
      best = current;
      best_set = tracker.members();
    }
  }

  ExpansionReport report{eps, mode, best, std::move(best_set), false};
  std::sort(report.witness.begin(), report.witness.end());
  return report;
}

}  // namespace outbreak
