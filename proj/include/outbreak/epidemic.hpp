#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"
#include "outbreak/components.hpp"
#include "outbreak/graph.hpp"
#include "outbreak/rng.hpp"

namespace outbreak {

// p = lambda / (lambda + 1): the chance that a unit-rate contact clock fires
// within a unit infectious period, under the rate-lambda parametrization.
double lambda_to_p(double lambda);

struct TransmissionParams {
  double p = 0.0;
  std::optional<double> lambda;

  static TransmissionParams from_p(double p);
  static TransmissionParams from_lambda(double lambda);
};

/// Fixed-recovery SIR outcome. `infected` lists every ever-infected vertex
/// in Reed-Frost generation order (seeds first); generation_sizes[g] counts
/// generation g.
struct OutbreakRecord {
  std::vector<Vertex> seeds;
  std::size_t final_size = 0;
  double relative_size = 0.0;
  std::optional<bool> reached_k;
  std::vector<Vertex> infected;
  std::vector<std::size_t> generation_sizes;
};

// Deterministic spread over the open edges of `mask`. Throws on an empty
// seed set, an out-of-range seed or a mask/graph mismatch.
OutbreakRecord run_sir_with_mask(const Graph& g, std::span<const Vertex> seeds, const EdgeMask& mask);

// Draws edge e's transmission indicator as edge_uniform(stream, e) < p, the
// same tape percolate() uses for (seed, trial) with stream = trial_stream().
OutbreakRecord run_sir(const Graph& g, std::span<const Vertex> seeds, const TransmissionParams& params,
                       Seed stream);

// Algorithm's query counts the seed towards |R| by default; kExcludeSeed
// requires k infections besides the seed.
enum class SuccessRule { kIncludeSeed, kExcludeSeed };

// One local query: SIR from v inside the induced subgraph on B_k(v), edge
// tape from `stream`. Returns whether the recovered set reaches the
// threshold.
bool local_query(const Graph& g, Vertex v, std::uint32_t k, const TransmissionParams& params, Seed stream,
                 SuccessRule rule = SuccessRule::kIncludeSeed);

struct EstimateOptions {
  unsigned threads = 1;
  SuccessRule rule = SuccessRule::kIncludeSeed;
  bool measure_overlap = true;
};

struct EstimatorReport {
  std::uint32_t k = 0;
  std::size_t q = 0;
  std::size_t successes = 0;
  double n_tilde = 0.0;
  double halfwidth = 0.0;  // 95% normal-approximation binomial interval
  Seed master_seed = 0;
  std::optional<double> overlap_fraction;  // pairs of queries whose k-balls intersect
  std::optional<double> acceptance_rate;   // degree-biased seeding only
  std::string seeding = "uniform";
  SuccessRule rule = SuccessRule::kIncludeSeed;

  nlohmann::json to_json() const;
};

// q queries at uniform vertices; query i uses stream trial_stream(master_seed, i)
// for both its start vertex and its edge tape.
EstimatorReport estimate(const Graph& g, std::uint32_t k, std::size_t q, const TransmissionParams& params,
                         Seed master_seed, const EstimateOptions& options = {});

// Start vertices accepted with probability deg(v)/maxdeg (rejection sampling).
EstimatorReport estimate_degree_biased(const Graph& g, std::uint32_t k, std::size_t q,
                                       const TransmissionParams& params, Seed master_seed,
                                       const EstimateOptions& options = {});

struct AdaptiveReport {
  EstimatorReport report;
  std::vector<EstimatorReport> stages;
  std::uint32_t diameter_proxy = 0;
  bool best_effort = false;

  nlohmann::json to_json() const;
};

// k = 8, 16, 32, ... with q = ceil(8/eps^2) queries per stage, all stages on
// the same query tapes. Stops once two successive stages differ by less than
// eps/2, or flags best effort when k would pass a diameter upper bound.
AdaptiveReport adaptive_estimate(const Graph& g, double eps, const TransmissionParams& params,
                                 Seed master_seed, const EstimateOptions& options = {});

struct OutbreakTrial {
  Vertex seed = 0;
  std::size_t final_size = 0;
  double relative_size = 0.0;
};

struct HistogramOptions {
  double delta = 0.05;
  std::optional<double> zeta_ref;  // defaults to the mean relative size over trials >= delta
  std::size_t bins = 100;
  unsigned threads = 1;
};

struct OutbreakHistogram {
  std::vector<OutbreakTrial> trials;
  std::vector<std::size_t> bin_counts;  // equal-width bins over [0, 1]
  double delta = 0.0;
  double zeta_ref = 0.0;
  bool zeta_ref_empirical = false;
  double low_mass = 0.0;     // [0, delta)
  double middle_mass = 0.0;  // [delta, zeta_ref - delta)
  double upper_mass = 0.0;   // [zeta_ref - delta, 1]

  double mass_in(double lo, double hi) const;  // closed interval
  nlohmann::json summary_json() const;
};

OutbreakHistogram outbreak_histogram(const Graph& g, std::size_t trials, const TransmissionParams& params,
                                     Seed master_seed, const HistogramOptions& options = {});

// Header "trial,seed,final_size,relative_size".
void write_outbreak_csv(std::ostream& out, const OutbreakHistogram& hist);

}  // namespace outbreak
