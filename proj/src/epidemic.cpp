#include "outbreak/epidemic.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <ostream>
#include <stdexcept>

#include "outbreak/parallel.hpp"
#include "outbreak/percolation.hpp"

namespace outbreak {

double lambda_to_p(double lambda) {
  if (!(lambda >= 0.0)) throw std::invalid_argument("lambda_to_p: rate must be non-negative");
  if (std::isinf(lambda)) return 1.0;
  return lambda / (lambda + 1.0);
}

TransmissionParams TransmissionParams::from_p(double p) {
  if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument("transmission probability must lie in [0, 1]");
  return {p, std::nullopt};
}

TransmissionParams TransmissionParams::from_lambda(double lambda) { return {lambda_to_p(lambda), lambda}; }

namespace {

void check_p(double p) {
  if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument("transmission probability must lie in [0, 1]");
}

// Reed-Frost generations over edges accepted by `open`.
template <typename Open>
OutbreakRecord spread(const Graph& g, std::span<const Vertex> seeds, Open&& open) {
  if (seeds.empty()) throw std::invalid_argument("run_sir: seed set must be non-empty");
  OutbreakRecord rec;
  std::vector<bool> infected(g.num_vertices(), false);
  for (Vertex s : seeds) {
    if (s >= g.num_vertices()) throw std::out_of_range("run_sir: seed out of range");
    if (infected[s]) continue;
    infected[s] = true;
    rec.seeds.push_back(s);
    rec.infected.push_back(s);
  }
  std::size_t begin = 0;
  while (begin < rec.infected.size()) {
    const std::size_t end = rec.infected.size();
    rec.generation_sizes.push_back(end - begin);
    for (std::size_t i = begin; i < end; ++i) {
      const Vertex x = rec.infected[i];
      const auto nbrs = g.neighbors(x);
      const auto ids = g.incident_edges(x);
      for (std::size_t j = 0; j < nbrs.size(); ++j) {
        if (!infected[nbrs[j]] && open(ids[j])) {
          infected[nbrs[j]] = true;
          rec.infected.push_back(nbrs[j]);
        }
      }
    }
    begin = end;
  }
  rec.final_size = rec.infected.size();
  rec.relative_size = static_cast<double>(rec.final_size) / static_cast<double>(g.num_vertices());
  return rec;
}

// Epoch-stamped scratch so repeated queries cost only what they touch.
class LocalWorkspace {
 public:
  explicit LocalWorkspace(std::size_t n) : ball_stamp_(n, 0), dist_(n, 0), infected_stamp_(n, 0) {}

  // BFS to `radius`; calls visit(u, dist) for each reached vertex.
  template <typename Visit>
  void explore_ball(const Graph& g, Vertex center, std::uint32_t radius, Visit&& visit) {
    ++epoch_;
    queue_.clear();
    queue_.push_back(center);
    ball_stamp_[center] = epoch_;
    dist_[center] = 0;
    visit(center, 0u);
    for (std::size_t head = 0; head < queue_.size(); ++head) {
      const Vertex x = queue_[head];
      if (dist_[x] == radius) continue;
      for (Vertex w : g.neighbors(x)) {
        if (ball_stamp_[w] == epoch_) continue;
        ball_stamp_[w] = epoch_;
        dist_[w] = dist_[x] + 1;
        queue_.push_back(w);
        visit(w, dist_[w]);
      }
    }
  }

  // SIR from center restricted to vertices of the last explored ball with
  // distance <= radius. Stops as soon as `threshold` vertices are infected.
  template <typename Open>
  std::size_t spread_in_ball(const Graph& g, Vertex center, std::uint32_t radius, std::size_t threshold,
                             Open&& open) {
    queue_.clear();
    queue_.push_back(center);
    infected_stamp_[center] = epoch_;
    for (std::size_t head = 0; head < queue_.size() && queue_.size() < threshold; ++head) {
      const Vertex x = queue_[head];
      const auto nbrs = g.neighbors(x);
      const auto ids = g.incident_edges(x);
      for (std::size_t j = 0; j < nbrs.size(); ++j) {
        const Vertex w = nbrs[j];
        if (ball_stamp_[w] != epoch_ || dist_[w] > radius || infected_stamp_[w] == epoch_) continue;
        if (!open(ids[j])) continue;
        infected_stamp_[w] = epoch_;
        queue_.push_back(w);
      }
    }
    return queue_.size();
  }

  // Full open cluster of `center` (no ball restriction).
  template <typename Open>
  std::size_t cluster_size(const Graph& g, Vertex center, Open&& open) {
    ++epoch_;
    queue_.clear();
    queue_.push_back(center);
    infected_stamp_[center] = epoch_;
    for (std::size_t head = 0; head < queue_.size(); ++head) {
      const Vertex x = queue_[head];
      const auto nbrs = g.neighbors(x);
      const auto ids = g.incident_edges(x);
      for (std::size_t j = 0; j < nbrs.size(); ++j) {
        if (infected_stamp_[nbrs[j]] == epoch_ || !open(ids[j])) continue;
        infected_stamp_[nbrs[j]] = epoch_;
        queue_.push_back(nbrs[j]);
      }
    }
    return queue_.size();
  }

 private:
  std::uint32_t epoch_ = 0;
  std::vector<std::uint32_t> ball_stamp_;
  std::vector<std::uint32_t> dist_;
  std::vector<std::uint32_t> infected_stamp_;
  std::vector<Vertex> queue_;
};

std::size_t threshold_for(std::uint32_t k, SuccessRule rule) {
  return rule == SuccessRule::kIncludeSeed ? k : static_cast<std::size_t>(k) + 1;
}

struct QueryStart {
  Vertex vertex = 0;
  std::size_t draws = 1;
};

QueryStart uniform_start(const Graph& g, Seed stream) {
  Rng rng(stream);
  return {static_cast<Vertex>(rng.below(g.num_vertices())), 1};
}

QueryStart degree_biased_start(const Graph& g, Seed stream) {
  Rng rng(stream);
  const auto max_degree = static_cast<double>(g.max_degree());
  for (std::size_t draws = 1;; ++draws) {
    const auto v = static_cast<Vertex>(rng.below(g.num_vertices()));
    if (rng.uniform() * max_degree < static_cast<double>(g.degree(v))) return {v, draws};
  }
}

template <typename StartFn>
EstimatorReport run_queries(const Graph& g, std::uint32_t k, std::size_t q, const TransmissionParams& params,
                            Seed master_seed, const EstimateOptions& options, StartFn&& start_fn) {
  if (k < 1) throw std::invalid_argument("estimate: k must be >= 1");
  if (q < 1) throw std::invalid_argument("estimate: q must be >= 1");
  if (g.num_vertices() == 0) throw std::invalid_argument("estimate: empty graph");
  check_p(params.p);

  std::vector<QueryStart> starts(q);
  for (std::size_t i = 0; i < q; ++i) starts[i] = start_fn(g, trial_stream(master_seed, i));

  // Multiplicity of each vertex among the query starts, for the overlap diagnostic.
  std::vector<std::uint32_t> multiplicity;
  if (options.measure_overlap) {
    multiplicity.assign(g.num_vertices(), 0);
    for (const auto& s : starts) ++multiplicity[s.vertex];
  }

  const std::size_t threshold = threshold_for(k, options.rule);
  const unsigned workers = resolve_threads(options.threads);
  std::vector<LocalWorkspace> scratch(workers, LocalWorkspace(g.num_vertices()));
  std::vector<std::uint8_t> success(q, 0);
  std::vector<std::uint64_t> overlaps(q, 0);
  parallel_for(q, workers, [&](std::size_t i, unsigned worker) {
    auto& ws = scratch[worker];
    const Vertex v = starts[i].vertex;
    const Seed stream = trial_stream(master_seed, i);
    std::uint64_t hits = 0;
    // Balls B_k(a) and B_k(b) meet iff dist(a, b) <= 2k.
    const std::uint32_t radius =
        options.measure_overlap ? static_cast<std::uint32_t>(std::min<std::uint64_t>(2ull * k, UINT32_MAX - 1)) : k;
    ws.explore_ball(g, v, radius, [&](Vertex u, std::uint32_t) {
      if (options.measure_overlap) hits += multiplicity[u];
    });
    overlaps[i] = hits - 1;  // the query's own start vertex
    const std::size_t reached = ws.spread_in_ball(g, v, k, threshold, [&](EdgeId e) {
      return edge_open(stream, e, params.p);
    });
    success[i] = reached >= threshold;
  });

  EstimatorReport report;
  report.k = k;
  report.q = q;
  report.master_seed = master_seed;
  report.rule = options.rule;
  for (std::size_t i = 0; i < q; ++i) report.successes += success[i];
  report.n_tilde = static_cast<double>(report.successes) / static_cast<double>(q);
  report.halfwidth = 1.96 * std::sqrt(report.n_tilde * (1.0 - report.n_tilde) / static_cast<double>(q));
  if (options.measure_overlap) {
    std::uint64_t total = 0;
    for (auto x : overlaps) total += x;
    const double pairs = static_cast<double>(q) * static_cast<double>(q - 1) / 2.0;
    report.overlap_fraction = q > 1 ? static_cast<double>(total) / 2.0 / pairs : 0.0;
  }
  std::size_t draws = 0;
  for (const auto& s : starts) draws += s.draws;
  report.acceptance_rate = static_cast<double>(q) / static_cast<double>(draws);
  return report;
}

}  // namespace

OutbreakRecord run_sir_with_mask(const Graph& g, std::span<const Vertex> seeds, const EdgeMask& mask) {
  if (mask.size() != g.num_edges()) {
    throw std::invalid_argument("run_sir_with_mask: mask has " + std::to_string(mask.size()) +
                                " bits for " + std::to_string(g.num_edges()) + " edges");
  }
  return spread(g, seeds, [&](EdgeId e) { return mask.open(e); });
}

OutbreakRecord run_sir(const Graph& g, std::span<const Vertex> seeds, const TransmissionParams& params,
                       Seed stream) {
  check_p(params.p);
  return spread(g, seeds, [&](EdgeId e) { return edge_open(stream, e, params.p); });
}

bool local_query(const Graph& g, Vertex v, std::uint32_t k, const TransmissionParams& params, Seed stream,
                 SuccessRule rule) {
  if (k < 1) throw std::invalid_argument("local_query: k must be >= 1");
  if (v >= g.num_vertices()) throw std::out_of_range("local_query: vertex out of range");
  check_p(params.p);
  LocalWorkspace ws(g.num_vertices());
  ws.explore_ball(g, v, k, [](Vertex, std::uint32_t) {});
  const std::size_t threshold = threshold_for(k, rule);
  return ws.spread_in_ball(g, v, k, threshold, [&](EdgeId e) { return edge_open(stream, e, params.p); }) >=
         threshold;
}

EstimatorReport estimate(const Graph& g, std::uint32_t k, std::size_t q, const TransmissionParams& params,
                         Seed master_seed, const EstimateOptions& options) {
  auto report = run_queries(g, k, q, params, master_seed, options, uniform_start);
  report.acceptance_rate.reset();
  return report;
}

EstimatorReport estimate_degree_biased(const Graph& g, std::uint32_t k, std::size_t q,
                                       const TransmissionParams& params, Seed master_seed,
                                       const EstimateOptions& options) {
  if (g.max_degree() == 0) throw std::invalid_argument("estimate_degree_biased: graph has no edges");
  auto report = run_queries(g, k, q, params, master_seed, options, degree_biased_start);
  report.seeding = "degree_biased";
  return report;
}

namespace {

std::uint32_t diameter_upper_bound(const Graph& g, Seed seed) {
  // Twice the eccentricity of a double-sweep endpoint bounds the diameter of
  // its component; take the worst over a few random starts.
  Rng rng(seed);
  std::uint32_t bound = 0;
  for (int sweep = 0; sweep < 4; ++sweep) {
    const auto start = static_cast<Vertex>(rng.below(g.num_vertices()));
    auto d1 = graph_distances(g, start);
    Vertex far = start;
    for (Vertex v = 0; v < g.num_vertices(); ++v) {
      if (d1[v] != UINT32_MAX && d1[v] > d1[far]) far = v;
    }
    const auto d2 = graph_distances(g, far);
    std::uint32_t ecc = 0;
    for (auto d : d2) {
      if (d != UINT32_MAX) ecc = std::max(ecc, d);
    }
    bound = std::max(bound, 2 * ecc);
  }
  return bound;
}

}  // namespace

AdaptiveReport adaptive_estimate(const Graph& g, double eps, const TransmissionParams& params, Seed master_seed,
                                 const EstimateOptions& options) {
  if (!(eps > 0.0 && eps < 1.0)) throw std::invalid_argument("adaptive_estimate: eps must lie in (0, 1)");
  if (g.num_vertices() == 0) throw std::invalid_argument("adaptive_estimate: empty graph");
  const auto q = static_cast<std::size_t>(std::ceil(8.0 / (eps * eps)));
  AdaptiveReport out;
  out.diameter_proxy = std::max<std::uint32_t>(diameter_upper_bound(g, derive_seed(master_seed, "diameter", 0)), 1);

  std::uint32_t k = 8;
  for (;;) {
    out.stages.push_back(estimate(g, k, q, params, master_seed, options));
    const std::size_t s = out.stages.size();
    if (s >= 2 && std::abs(out.stages[s - 1].n_tilde - out.stages[s - 2].n_tilde) < eps / 2.0) break;
    if (k > out.diameter_proxy || k >= (1u << 30)) {
      out.best_effort = true;
      break;
    }
    k *= 2;
  }
  out.report = out.stages.back();
  return out;
}

double OutbreakHistogram::mass_in(double lo, double hi) const {
  if (trials.empty()) return 0.0;
  std::size_t count = 0;
  for (const auto& t : trials) count += t.relative_size >= lo && t.relative_size <= hi;
  return static_cast<double>(count) / static_cast<double>(trials.size());
}

OutbreakHistogram outbreak_histogram(const Graph& g, std::size_t trials, const TransmissionParams& params,
                                     Seed master_seed, const HistogramOptions& options) {
  if (trials < 1) throw std::invalid_argument("outbreak_histogram: trials must be >= 1");
  if (g.num_vertices() == 0) throw std::invalid_argument("outbreak_histogram: empty graph");
  if (options.bins < 1) throw std::invalid_argument("outbreak_histogram: bins must be >= 1");
  check_p(params.p);

  OutbreakHistogram hist;
  hist.delta = options.delta;
  hist.trials.resize(trials);
  const unsigned workers = resolve_threads(options.threads);
  std::vector<LocalWorkspace> scratch(workers, LocalWorkspace(g.num_vertices()));
  const auto n = static_cast<double>(g.num_vertices());
  parallel_for(trials, workers, [&](std::size_t t, unsigned worker) {
    const Seed stream = trial_stream(master_seed, t);
    const Vertex seed = uniform_start(g, stream).vertex;
    const std::size_t size =
        scratch[worker].cluster_size(g, seed, [&](EdgeId e) { return edge_open(stream, e, params.p); });
    hist.trials[t] = {seed, size, static_cast<double>(size) / n};
  });

  hist.bin_counts.assign(options.bins, 0);
  for (const auto& t : hist.trials) {
    const auto bin = std::min(options.bins - 1, static_cast<std::size_t>(t.relative_size * static_cast<double>(options.bins)));
    ++hist.bin_counts[bin];
  }
  if (options.zeta_ref) {
    hist.zeta_ref = *options.zeta_ref;
  } else {
    hist.zeta_ref_empirical = true;
    double sum = 0.0;
    std::size_t count = 0;
    for (const auto& t : hist.trials) {
      if (t.relative_size >= hist.delta) {
        sum += t.relative_size;
        ++count;
      }
    }
    hist.zeta_ref = count ? sum / static_cast<double>(count) : 0.0;
  }
  std::size_t low = 0, middle = 0, upper = 0;
  for (const auto& t : hist.trials) {
    if (t.relative_size < hist.delta) {
      ++low;
    } else if (t.relative_size < hist.zeta_ref - hist.delta) {
      ++middle;
    } else {
      ++upper;
    }
  }
  const auto total = static_cast<double>(trials);
  hist.low_mass = static_cast<double>(low) / total;
  hist.middle_mass = static_cast<double>(middle) / total;
  hist.upper_mass = static_cast<double>(upper) / total;
  return hist;
}

nlohmann::json OutbreakHistogram::summary_json() const {
  return {{"trials", trials.size()},
          {"delta", delta},
          {"zeta_ref", zeta_ref},
          {"zeta_ref_source", zeta_ref_empirical ? "empirical" : "given"},
          {"band_note", "fixed relative band delta stands in for the asymptotic omega(n) window"},
          {"low_mass", low_mass},
          {"middle_mass", middle_mass},
          {"upper_mass", upper_mass},
          {"bin_counts", bin_counts}};
}

void write_outbreak_csv(std::ostream& out, const OutbreakHistogram& hist) {
  out << "trial,seed,final_size,relative_size\n";
  for (std::size_t t = 0; t < hist.trials.size(); ++t) {
    const auto& r = hist.trials[t];
    out << fmt::format("{},{},{},{}\n", t, r.seed, r.final_size, r.relative_size);
  }
}

nlohmann::json EstimatorReport::to_json() const {
  nlohmann::json j{{"k", k},
                   {"q", q},
                   {"successes", successes},
                   {"n_tilde", n_tilde},
                   {"halfwidth", halfwidth},
                   {"master_seed", master_seed},
                   {"seeding", seeding},
                   {"rule", rule == SuccessRule::kIncludeSeed ? "include_seed" : "exclude_seed"}};
  j["overlap_fraction"] = overlap_fraction ? nlohmann::json(*overlap_fraction) : nlohmann::json(nullptr);
  if (acceptance_rate) j["acceptance_rate"] = *acceptance_rate;
  return j;
}

nlohmann::json AdaptiveReport::to_json() const {
  nlohmann::json j = report.to_json();
  j["best_effort"] = best_effort;
  j["diameter_proxy"] = diameter_proxy;
  nlohmann::json schedule = nlohmann::json::array();
  for (const auto& s : stages) schedule.push_back({{"k", s.k}, {"q", s.q}, {"n_tilde", s.n_tilde}});
  j["schedule"] = schedule;
  return j;
}

}  // namespace outbreak
