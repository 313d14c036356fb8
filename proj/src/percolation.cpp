#include "outbreak/percolation.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <ostream>

#include "outbreak/parallel.hpp"

namespace outbreak {

Seed trial_stream(Seed seed, std::uint64_t trial_index) { return derive_seed(seed, "trial", trial_index); }

EdgeMask percolate(const Graph& g, double p, Seed seed, std::uint64_t trial_index) {
  if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument("percolate: p must lie in [0, 1]");
  const Seed stream = trial_stream(seed, trial_index);
  EdgeMask mask{std::vector<bool>(g.num_edges()), p, seed, trial_index};
  for (EdgeId e = 0; e < g.num_edges(); ++e) mask.bits[e] = edge_open(stream, e, p);
  return mask;
}

TrialSummary TrialSummary::from(std::vector<double> values) {
  TrialSummary s;
  s.per_trial = std::move(values);
  const auto count = static_cast<double>(s.per_trial.size());
  if (s.per_trial.empty()) return s;
  s.mean = std::accumulate(s.per_trial.begin(), s.per_trial.end(), 0.0) / count;
  double ss = 0.0;
  for (double x : s.per_trial) ss += (x - s.mean) * (x - s.mean);
  s.stddev = s.per_trial.size() > 1 ? std::sqrt(ss / (count - 1.0)) : 0.0;
  s.stderr_ = s.stddev / std::sqrt(count);
  const auto [lo, hi] = std::minmax_element(s.per_trial.begin(), s.per_trial.end());
  s.min = *lo;
  s.max = *hi;
  return s;
}

TrialSummary giant_fraction(const Graph& g, double p, std::size_t trials, Seed seed, unsigned threads) {
  const double grid[] = {p};
  return giant_fraction_curve(g, grid, trials, seed, threads).front();
}

std::vector<TrialSummary> giant_fraction_curve(const Graph& g, std::span<const double> grid,
                                               std::size_t trials, Seed seed, unsigned threads) {
  if (trials == 0) throw std::invalid_argument("giant_fraction: trials must be >= 1");
  for (double p : grid) {
    if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument("giant_fraction: p must lie in [0, 1]");
  }
  std::vector<std::vector<double>> values(grid.size(), std::vector<double>(trials));
  parallel_for(trials, resolve_threads(threads), [&](std::size_t t, unsigned) {
    const Seed stream = trial_stream(seed, t);
    std::vector<double> uniforms(g.num_edges());
    for (EdgeId e = 0; e < g.num_edges(); ++e) uniforms[e] = edge_uniform(stream, e);
    for (std::size_t i = 0; i < grid.size(); ++i) {
      UnionFind uf(g.num_vertices());
      std::size_t largest = g.num_vertices() > 0 ? 1 : 0;
      const auto edges = g.edges();
      for (EdgeId e = 0; e < edges.size(); ++e) {
        if (uniforms[e] < grid[i] && uf.unite(edges[e].u, edges[e].v)) {
          largest = std::max(largest, uf.component_size(edges[e].u));
        }
      }
      values[i][t] = g.num_vertices() == 0 ? 0.0 : static_cast<double>(largest) / static_cast<double>(g.num_vertices());
    }
  });
  std::vector<TrialSummary> out;
  out.reserve(grid.size());
  for (auto& v : values) out.push_back(TrialSummary::from(std::move(v)));
  return out;
}

std::vector<double> finite_cluster_tail(const ComponentStats& stats, std::span<const std::size_t> ks) {
  std::vector<double> out;
  const auto n = static_cast<double>(stats.labels.size());
  for (std::size_t k : ks) {
    std::size_t count = 0;
    for (std::size_t label = 1; label < stats.sizes.size(); ++label) {
      if (stats.sizes[label] >= k) count += stats.sizes[label];
    }
    out.push_back(n == 0 ? 0.0 : static_cast<double>(count) / n);
  }
  return out;
}

DegreeLaw::DegreeLaw(std::vector<double> weights, double truncated_mass)
    : pmf_(std::move(weights)), truncated_mass_(truncated_mass) {
  if (pmf_.empty()) throw std::invalid_argument("DegreeLaw: empty distribution");
  if (pmf_.size() > kSupportCap + 1) throw std::invalid_argument("DegreeLaw: support exceeds the cap");
  double total = 0.0;
  for (double w : pmf_) {
    if (!(w >= 0.0)) throw std::invalid_argument("DegreeLaw: negative weight");
    total += w;
  }
  if (!(total > 0.0)) throw std::invalid_argument("DegreeLaw: zero total weight");
  for (auto& w : pmf_) w /= total;
  for (std::size_t k = 0; k < pmf_.size(); ++k) mean_ += static_cast<double>(k) * pmf_[k];
  if (!(mean_ > 0.0)) throw std::invalid_argument("DegreeLaw: mean degree must be positive");
}

DegreeLaw DegreeLaw::constant(std::size_t d) {
  std::vector<double> w(d + 1, 0.0);
  w[d] = 1.0;
  return DegreeLaw(std::move(w));
}

DegreeLaw DegreeLaw::from_sequence(const DegreeSequence& seq) {
  std::vector<double> w(seq.max() + 1, 0.0);
  for (auto d : seq.degrees) w[d] += 1.0;
  return DegreeLaw(std::move(w));
}

DegreeLaw DegreeLaw::power_law(double tau, std::size_t d_min, std::size_t d_max) {
  if (d_min == 0 || d_min > d_max || !(tau > 1.0)) {
    throw std::invalid_argument("DegreeLaw::power_law needs tau > 1 and 1 <= d_min <= d_max");
  }
  std::vector<double> w(d_max + 1, 0.0);
  double kept = 0.0;
  for (std::size_t k = d_min; k <= d_max; ++k) {
    w[k] = std::pow(static_cast<double>(k), -tau);
    kept += w[k];
  }
  const double tail = std::pow(static_cast<double>(d_max) + 0.5, 1.0 - tau) / (tau - 1.0);
  return DegreeLaw(std::move(w), tail / (kept + tail));
}

double DegreeLaw::pgf(double s) const {
  double acc = 0.0;
  for (std::size_t k = pmf_.size(); k-- > 0;) acc = acc * s + pmf_[k];
  return acc;
}

double DegreeLaw::size_biased_pgf(double s) const {
  // sum_{k>=1} k p_k s^(k-1) / mean
  double acc = 0.0;
  for (std::size_t k = pmf_.size(); k-- > 1;) acc = acc * s + static_cast<double>(k) * pmf_[k];
  return acc / mean_;
}

double DegreeLaw::offspring_mean() const {
  double acc = 0.0;
  for (std::size_t k = 2; k < pmf_.size(); ++k) acc += static_cast<double>(k * (k - 1)) * pmf_[k];
  return acc / mean_;
}

FixedPointResult survival_fixed_point_cm(const DegreeLaw& law, double p, const FixedPointOptions& options) {
  if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument("survival_fixed_point_cm: p must lie in [0, 1]");
  FixedPointResult result;
  auto step = [&](double eta) { return law.size_biased_pgf(1.0 - p + p * eta); };

  // Percolated offspring law is Binomial thinning of D*-1; it equals 1 a.s.
  // only when p = 1 and every positive degree is 2, in which case every
  // point of [0,1] is fixed and the iteration below stays at 0.
  const auto pmf = law.pmf();
  const double positive_mass = 1.0 - pmf[0];
  const bool offspring_always_one = p == 1.0 && pmf.size() > 2 && std::abs(pmf[2] - positive_mass) < 1e-15;
  if (p * law.offspring_mean() <= 1.0 && !offspring_always_one) {
    result.eta = 1.0;
    result.zeta = 0.0;
    result.shortcut = true;
    if (options.record_trace) result.trace.push_back(1.0);
    return result;
  }

  double eta = 0.0;
  if (options.record_trace) result.trace.push_back(eta);
  for (std::size_t it = 1; it <= options.max_iterations; ++it) {
    const double next = step(eta);
    if (options.record_trace) result.trace.push_back(next);
    const double delta = std::abs(next - eta);
    eta = next;
    if (delta <= options.tolerance) {
      result.iterations = it;
      result.eta = eta;
      result.gap = std::abs(step(eta) - eta);
      result.zeta = 1.0 - law.pgf(1.0 - p + p * eta);
      return result;
    }
  }
  throw ConvergenceError("survival_fixed_point_cm: no convergence within " +
                             std::to_string(options.max_iterations) + " iterations",
                         eta, std::abs(step(eta) - eta));
}

namespace {

void check_grid(std::span<const double> grid) {
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (!(grid[i] >= 0.0 && grid[i] <= 1.0) || (i > 0 && grid[i] < grid[i - 1])) {
      throw std::invalid_argument("survival_curve: grid must be sorted within [0, 1]");
    }
  }
}

}  // namespace

SurvivalCurve survival_curve(const DegreeLaw& law, std::span<const double> grid,
                             const FixedPointOptions& options) {
  check_grid(grid);
  SurvivalCurve curve;
  curve.method = CurveMethod::kFixedPoint;
  for (double p : grid) {
    const auto fp = survival_fixed_point_cm(law, p, options);
    curve.grid.push_back(p);
    curve.zeta.push_back(fp.zeta);
    curve.error.push_back(fp.shortcut ? 0.0 : std::max(fp.gap, options.tolerance));
  }
  return curve;
}

SurvivalCurve survival_curve(const Graph& g, std::span<const double> grid, std::size_t trials,
                             Seed seed, unsigned threads) {
  check_grid(grid);
  SurvivalCurve curve;
  curve.method = CurveMethod::kMonteCarlo;
  const auto summaries = giant_fraction_curve(g, grid, trials, seed, threads);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    curve.grid.push_back(grid[i]);
    curve.zeta.push_back(summaries[i].mean);
    curve.error.push_back(1.96 * summaries[i].stderr_);
  }
  return curve;
}

void write_survival_csv(std::ostream& out, const SurvivalCurve& curve) {
  const char* method = curve.method == CurveMethod::kFixedPoint ? "fixed_point" : "monte_carlo";
  out << "p,zeta,err,method\n";
  for (std::size_t i = 0; i < curve.grid.size(); ++i) {
    out << fmt::format("{},{},{},{}\n", curve.grid[i], curve.zeta[i], curve.error[i], method);
  }
}

std::vector<std::uint32_t> graph_distances(const Graph& g, Vertex root) {
  std::vector<std::uint32_t> dist(g.num_vertices(), UINT32_MAX);
  std::vector<Vertex> queue{root};
  dist[root] = 0;
  for (std::size_t head = 0; head < queue.size(); ++head) {
    const Vertex x = queue[head];
    for (Vertex w : g.neighbors(x)) {
      if (dist[w] == UINT32_MAX) {
        dist[w] = dist[x] + 1;
        queue.push_back(w);
      }
    }
  }
  return dist;
}

namespace {

inline bool is_far(std::uint32_t d, std::uint32_t k) { return d != UINT32_MAX && d >= k; }

// Per-worker scratch for cluster exploration. Only touched entries are reset.
struct ClusterScratch {
  std::vector<std::uint32_t> disc;  // 0 = unvisited, else DFS time + 1
  std::vector<std::uint32_t> low;
  std::vector<std::uint32_t> far_below;
  std::vector<Vertex> touched;

  explicit ClusterScratch(std::size_t n) : disc(n, 0), low(n, 0), far_below(n, 0) {}

  void reset() {
    for (Vertex v : touched) disc[v] = 0;
    touched.clear();
  }
};

template <typename Open>
bool reaches_far(const Graph& g, Vertex root, std::uint32_t k, std::span<const std::uint32_t> dist,
                 Open&& open, ClusterScratch& scratch) {
  bool found = is_far(dist[root], k);
  scratch.touched.push_back(root);
  scratch.disc[root] = 1;
  for (std::size_t head = 0; head < scratch.touched.size() && !found; ++head) {
    const Vertex x = scratch.touched[head];
    const auto nbrs = g.neighbors(x);
    const auto ids = g.incident_edges(x);
    for (std::size_t i = 0; i < nbrs.size(); ++i) {
      const Vertex w = nbrs[i];
      if (scratch.disc[w] || !open(ids[i])) continue;
      scratch.disc[w] = 1;
      scratch.touched.push_back(w);
      if (is_far(dist[w], k)) {
        found = true;
        break;
      }
    }
  }
  scratch.reset();
  return found;
}

// Iterative Tarjan bridge search over root's open cluster. A bridge (parent,
// child) is a k-bridge iff the child's DFS subtree holds every far vertex of
// the cluster (and there is at least one).
template <typename Open>
std::size_t k_bridges(const Graph& g, Vertex root, std::uint32_t k, std::span<const std::uint32_t> dist,
                      Open&& open, ClusterScratch& scratch) {
  struct Frame {
    Vertex vertex;
    EdgeId parent_edge;
    std::size_t next;
  };
  std::vector<Frame> stack;
  std::vector<Vertex> bridge_children;
  std::uint32_t clock = 0;
  auto enter = [&](Vertex v, EdgeId via) {
    scratch.disc[v] = scratch.low[v] = ++clock;
    scratch.far_below[v] = is_far(dist[v], k) ? 1 : 0;
    scratch.touched.push_back(v);
    stack.push_back({v, via, 0});
  };
  enter(root, UINT32_MAX);
  while (!stack.empty()) {
    Frame& top = stack.back();
    const Vertex x = top.vertex;
    const auto nbrs = g.neighbors(x);
    const auto ids = g.incident_edges(x);
    if (top.next < nbrs.size()) {
      const std::size_t i = top.next++;
      const EdgeId e = ids[i];
      if (e == top.parent_edge || !open(e)) continue;
      const Vertex w = nbrs[i];
      if (scratch.disc[w]) {
        scratch.low[x] = std::min(scratch.low[x], scratch.disc[w]);
      } else {
        enter(w, e);
      }
      continue;
    }
    const Frame done = top;
    stack.pop_back();
    if (stack.empty()) break;
    const Vertex parent = stack.back().vertex;
    scratch.low[parent] = std::min(scratch.low[parent], scratch.low[done.vertex]);
    scratch.far_below[parent] += scratch.far_below[done.vertex];
    if (scratch.low[done.vertex] > scratch.disc[parent]) bridge_children.push_back(done.vertex);
  }
  const std::uint32_t far_total = scratch.far_below[root];
  std::size_t count = 0;
  if (far_total > 0) {
    for (Vertex c : bridge_children) count += scratch.far_below[c] == far_total;
  }
  scratch.reset();
  return count;
}

}  // namespace

std::size_t count_k_bridges(const Graph& g, Vertex root, std::uint32_t k, const EdgeMask& mask,
                            std::span<const std::uint32_t> distance) {
  if (mask.size() != g.num_edges()) throw std::invalid_argument("count_k_bridges: mask length mismatch");
  ClusterScratch scratch(g.num_vertices());
  return k_bridges(g, root, k, distance, [&](EdgeId e) { return mask.open(e); }, scratch);
}

bool reaches_distance(const Graph& g, Vertex root, std::uint32_t k, const EdgeMask& mask,
                      std::span<const std::uint32_t> distance) {
  if (mask.size() != g.num_edges()) throw std::invalid_argument("reaches_distance: mask length mismatch");
  ClusterScratch scratch(g.num_vertices());
  return reaches_far(g, root, k, distance, [&](EdgeId e) { return mask.open(e); }, scratch);
}

BridgeReport pivotal_bridge_report(const Graph& g, Vertex root, std::uint32_t k, double p,
                                   std::size_t trials, Seed seed, double h, unsigned threads) {
  if (k < 1) throw std::invalid_argument("pivotal_bridge_report: k must be >= 1");
  if (trials < 1) throw std::invalid_argument("pivotal_bridge_report: trials must be >= 1");
  if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument("pivotal_bridge_report: p must lie in [0, 1]");
  if (root >= g.num_vertices()) throw std::out_of_range("pivotal_bridge_report: root out of range");

  const auto dist = graph_distances(g, root);
  BridgeReport report;
  report.k = k;
  report.p = p;
  report.trials = trials;
  report.p_low = std::max(0.0, p - h);
  report.p_high = std::min(1.0, p + h);

  const unsigned workers = resolve_threads(threads);
  std::vector<ClusterScratch> scratch(workers, ClusterScratch(g.num_vertices()));
  std::vector<double> bridges(trials), hits(trials), diffs(trials);
  parallel_for(trials, workers, [&](std::size_t t, unsigned worker) {
    const Seed stream = trial_stream(seed, t);
    auto open_at = [&](double q) { return [stream, q](EdgeId e) { return edge_open(stream, e, q); }; };
    auto& s = scratch[worker];
    bridges[t] = static_cast<double>(k_bridges(g, root, k, dist, open_at(p), s));
    hits[t] = reaches_far(g, root, k, dist, open_at(p), s) ? 1.0 : 0.0;
    const bool high = reaches_far(g, root, k, dist, open_at(report.p_high), s);
    const bool low = reaches_far(g, root, k, dist, open_at(report.p_low), s);
    diffs[t] = static_cast<double>(high) - static_cast<double>(low);
  });

  const auto bridge_summary = TrialSummary::from(std::move(bridges));
  const auto hit_summary = TrialSummary::from(std::move(hits));
  const auto diff_summary = TrialSummary::from(std::move(diffs));
  report.zeta_k = hit_summary.mean;
  report.bridge_count_mean = bridge_summary.mean;
  report.bridge_count_stderr = bridge_summary.stderr_;
  if (p > 0.0) {
    report.pivotal_rate = bridge_summary.mean / p;
    report.pivotal_rate_stderr = bridge_summary.stderr_ / p;
  }
  const double width = report.p_high - report.p_low;
  if (width > 0.0) {
    report.slope = diff_summary.mean / width;
    report.slope_stderr = diff_summary.stderr_ / width;
  }
  return report;
}

void write_bridge_csv(std::ostream& out, std::span<const BridgeReport> reports) {
  out << "p,zeta,err,method,k,trials,bridge_count_mean,bridge_count_stderr,pivotal_rate,"
         "pivotal_rate_stderr,slope,slope_stderr\n";
  for (const auto& r : reports) {
    const std::string rate = r.pivotal_rate ? fmt::format("{}", *r.pivotal_rate) : "undefined";
    const std::string rate_err = r.pivotal_rate_stderr ? fmt::format("{}", *r.pivotal_rate_stderr) : "undefined";
    const double zeta_err = r.trials > 1 ? 1.96 * std::sqrt(r.zeta_k * (1.0 - r.zeta_k) / static_cast<double>(r.trials)) : 0.0;
    out << fmt::format("{},{},{},monte_carlo,{},{},{},{},{},{},{},{}\n", r.p, r.zeta_k, zeta_err, r.k,
                       r.trials, r.bridge_count_mean, r.bridge_count_stderr, rate, rate_err, r.slope,
                       r.slope_stderr);
  }
}

}  // namespace outbreak
