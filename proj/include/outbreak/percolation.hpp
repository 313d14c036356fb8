#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <stdexcept>
#include <string_view>
#include <vector>

#include "outbreak/components.hpp"
#include "outbreak/graph.hpp"
#include "outbreak/rng.hpp"

namespace outbreak {

// Trial i of an operation seeded with `seed` reads its randomness from
// derive_seed(seed, "trial", i).
Seed trial_stream(Seed seed, std::uint64_t trial_index);

inline bool edge_open(Seed stream, EdgeId e, double p) { return edge_uniform(stream, e) < p; }

// Edge e is open iff edge_uniform(trial_stream(seed, trial_index), e) < p, so
// masks drawn from the same (seed, trial_index) are nested in p.
EdgeMask percolate(const Graph& g, double p, Seed seed, std::uint64_t trial_index);

struct TrialSummary {
  std::vector<double> per_trial;
  double mean = 0.0;
  double stddev = 0.0;  // sample standard deviation
  double stderr_ = 0.0;
  double min = 0.0;
  double max = 0.0;

  static TrialSummary from(std::vector<double> values);
};

// Largest-component fraction |C1|/n over independent percolation trials.
TrialSummary giant_fraction(const Graph& g, double p, std::size_t trials, Seed seed, unsigned threads = 1);

// One summary per grid point; trial i uses the same edge tape at every p.
std::vector<TrialSummary> giant_fraction_curve(const Graph& g, std::span<const double> grid,
                                               std::size_t trials, Seed seed, unsigned threads = 1);

// Fraction of vertices v with |C(v)| >= k and v outside the largest
// component, one entry per k.
std::vector<double> finite_cluster_tail(const ComponentStats& stats, std::span<const std::size_t> ks);

/// Finite tabulated degree distribution on {0, 1, ..., K}.
class DegreeLaw {
 public:
  static constexpr std::size_t kSupportCap = 1'000'000;

  // Normalizes `weights`. Throws when empty, negative, over the support cap
  // or with zero mean.
  explicit DegreeLaw(std::vector<double> weights, double truncated_mass = 0.0);

  static DegreeLaw constant(std::size_t d);
  static DegreeLaw from_sequence(const DegreeSequence& seq);
  // P(D = k) proportional to k^-tau on [d_min, d_max]; truncated_mass()
  // reports the (integral-approximated) mass the untruncated law puts above
  // d_max.
  static DegreeLaw power_law(double tau, std::size_t d_min, std::size_t d_max);

  std::span<const double> pmf() const noexcept { return pmf_; }
  double mean() const noexcept { return mean_; }
  double truncated_mass() const noexcept { return truncated_mass_; }

  double pgf(double s) const;              // E[s^D]
  double size_biased_pgf(double s) const;  // E[s^(D*-1)], P(D*=k) = k P(D=k)/E[D]
  double offspring_mean() const;           // E[D(D-1)]/E[D]

 private:
  std::vector<double> pmf_;
  double mean_ = 0.0;
  double truncated_mass_ = 0.0;
};

class ConvergenceError : public std::runtime_error {
 public:
  ConvergenceError(const std::string& what, double last_iterate, double gap)
      : std::runtime_error(what), last_iterate_(last_iterate), gap_(gap) {}
  double last_iterate() const noexcept { return last_iterate_; }
  double gap() const noexcept { return gap_; }

 private:
  double last_iterate_;
  double gap_;
};

struct FixedPointResult {
  double zeta = 0.0;  // 1 - g(1 - p + p*eta)
  double eta = 1.0;   // extinction probability along an edge
  std::size_t iterations = 0;
  double gap = 0.0;            // |eta - g*(1 - p + p*eta)| at return
  bool shortcut = false;       // (sub)critical: eta = 1 without iterating
  std::vector<double> trace;   // starting value then every iterate, when requested
};

struct FixedPointOptions {
  double tolerance = 1e-12;
  std::size_t max_iterations = 1'000'000;
  bool record_trace = false;
};

// Survival probability of the percolated branching-process limit of the
// configuration model. Iterates eta <- g*(1 - p + p*eta) from 0, which
// converges upward to the smallest fixed point. When the percolated
// offspring mean p*E[D(D-1)]/E[D] is at most 1 the smallest fixed point is 1
// and the iteration is skipped (it would only creep towards 1 sublinearly).
// Throws ConvergenceError on hitting the iteration cap.
FixedPointResult survival_fixed_point_cm(const DegreeLaw& law, double p,
                                         const FixedPointOptions& options = {});

enum class CurveMethod { kFixedPoint, kMonteCarlo };

struct SurvivalCurve {
  std::vector<double> grid;
  std::vector<double> zeta;
  std::vector<double> error;  // halfwidth; 95% normal interval for Monte Carlo
  CurveMethod method = CurveMethod::kFixedPoint;
};

SurvivalCurve survival_curve(const DegreeLaw& law, std::span<const double> grid,
                             const FixedPointOptions& options = {});
SurvivalCurve survival_curve(const Graph& g, std::span<const double> grid, std::size_t trials,
                             Seed seed, unsigned threads = 1);

// Header "p,zeta,err,method", rows in grid order.
void write_survival_csv(std::ostream& out, const SurvivalCurve& curve);

/// k-bridges: open edges whose removal separates the root from every vertex
/// at graph distance >= k in its open cluster.
struct BridgeReport {
  std::uint32_t k = 0;
  double p = 0.0;
  std::size_t trials = 0;
  double zeta_k = 0.0;                // fraction of trials where the cluster reaches distance k
  double bridge_count_mean = 0.0;
  double bridge_count_stderr = 0.0;
  std::optional<double> pivotal_rate;  // bridge_count_mean / p; empty at p = 0
  std::optional<double> pivotal_rate_stderr;
  // Central difference of zeta_k over [p_low, p_high] on shared edge tapes.
  double p_low = 0.0;
  double p_high = 0.0;
  double slope = 0.0;
  double slope_stderr = 0.0;
};

// Graph distances from `root` (UINT32_MAX where unreachable).
std::vector<std::uint32_t> graph_distances(const Graph& g, Vertex root);

// k-bridges of one realization. `distance` must come from graph_distances.
std::size_t count_k_bridges(const Graph& g, Vertex root, std::uint32_t k, const EdgeMask& mask,
                            std::span<const std::uint32_t> distance);

// Whether root's open cluster contains a vertex at graph distance >= k.
bool reaches_distance(const Graph& g, Vertex root, std::uint32_t k, const EdgeMask& mask,
                      std::span<const std::uint32_t> distance);

BridgeReport pivotal_bridge_report(const Graph& g, Vertex root, std::uint32_t k, double p,
                                   std::size_t trials, Seed seed, double h = 0.05,
                                   unsigned threads = 1);

void write_bridge_csv(std::ostream& out, std::span<const BridgeReport> reports);

}  // namespace outbreak
