#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"
#include "outbreak/graph.hpp"
#include "outbreak/rng.hpp"

namespace outbreak {

// Raised for inconsistent generator input (non-graphical sequences, parity
// violations, missing motif tables). `code` is a stable machine-readable tag.
class GeneratorError : public std::invalid_argument {
 public:
  GeneratorError(std::string code, const std::string& what)
      : std::invalid_argument(what), code_(std::move(code)) {}
  const std::string& code() const noexcept { return code_; }

 private:
  std::string code_;
};

/// A household: connected internal graph plus the number of external edge
/// endpoints each member receives.
struct Motif {
  Graph internal;
  std::vector<std::size_t> ext_degrees;

  std::size_t size() const noexcept { return internal.num_vertices(); }
  std::size_t external_degree() const noexcept;

  // Throws GeneratorError unless internal is connected, non-empty and
  // ext_degrees has one entry per vertex.
  void validate() const;
};

struct WeightedMotif {
  Motif motif;
  double probability = 0.0;
};

/// One motif law per external degree d; every motif in table d has total
/// external degree d.
class MotifDistribution {
 public:
  // s_max bounds every registered motif's size.
  explicit MotifDistribution(std::size_t s_max = 64) : s_max_(s_max) {}

  // Validates d(M) == d, motif sizes, and probabilities summing to 1.
  void add_table(std::size_t d, std::vector<WeightedMotif> entries);

  bool has_table(std::size_t d) const { return tables_.contains(d); }
  const std::vector<WeightedMotif>& table(std::size_t d) const;
  const Motif& draw(std::size_t d, Rng& rng) const;
  std::size_t s_max() const noexcept { return s_max_; }
  const std::map<std::size_t, std::vector<WeightedMotif>>& tables() const noexcept { return tables_; }

  // {"3": [{"edges": [[0,1],...], "ext": [1,1,1], "p": 1.0}], ...}
  static MotifDistribution from_json(const nlohmann::json& j, std::size_t s_max = 64);
  nlohmann::json to_json() const;

 private:
  std::size_t s_max_;
  std::map<std::size_t, std::vector<WeightedMotif>> tables_;
};

enum class Model { kConfiguration, kPreferentialAttachment, kMotifOverlay, kTwoBlock, kRegular };

struct PowerLawDegrees {
  double tau = 2.5;  // P(D = k) proportional to k^-tau on [d_min, d_max]
  std::size_t d_min = 3;
  std::size_t d_max = 1000;
  std::size_t n = 0;
};

/// Complete, serializable description of one random graph draw.
struct GenSpec {
  Model model = Model::kRegular;
  std::optional<DegreeSequence> degrees;       // configuration
  std::optional<PowerLawDegrees> power_law;    // configuration, alternative to degrees
  std::size_t m = 0;                           // preferential attachment
  std::size_t n = 0;                           // PA, two-block, regular
  std::size_t d = 0;                           // two-block, regular
  std::vector<GenSpec> external;               // motif overlay: exactly one entry
  std::optional<MotifDistribution> motifs;     // motif overlay
  Seed seed = 0;
  std::size_t max_retries = 1000;

  void validate() const;
  nlohmann::json to_json() const;
  static GenSpec from_json(const nlohmann::json& j);
  // FNV-1a of the canonical (key-sorted, compact) JSON dump.
  std::uint64_t hash() const;
};

struct PaCounters {
  std::uint64_t tuple_draws = 0;
  std::uint64_t rejected = 0;
  // Sum over arrivals of C(m,2) * maxdeg / (2|E|): the union bound on each
  // step's collision probability.
  double rejection_bound = 0.0;
};

struct Provenance {
  std::uint64_t spec_hash = 0;
  Seed seed = 0;
  bool erased = false;        // configuration fallback: loops/multi-edges erased
  std::size_t attempts = 0;   // whole matchings tried (configuration)
  std::optional<PaCounters> pa;

  nlohmann::json to_json() const;
};

struct GeneratedGraph {
  Graph graph;
  Provenance provenance;
  std::vector<std::uint32_t> motif_of;  // overlay: vertex -> external vertex
  std::optional<EdgeId> bridge;         // two-block
};

DegreeSequence constant_degrees(std::size_t d, std::size_t n);

// i.i.d. truncated power-law degrees; the last degree is bumped by one when
// needed to make the sum even.
DegreeSequence power_law_degrees(const PowerLawDegrees& law, Seed seed);

GeneratedGraph gen_cm_simple(const DegreeSequence& d, Seed seed, std::size_t max_retries = 1000);
GeneratedGraph gen_pa(std::size_t m, std::size_t n, Seed seed);
GeneratedGraph gen_motif_overlay(const Graph& external, const MotifDistribution& motifs, Seed seed);
GeneratedGraph gen_two_block(std::size_t d, std::size_t n, Seed seed);
GeneratedGraph gen_k_regular(std::size_t d, std::size_t n, Seed seed);

// Dispatches on spec.model and stamps spec.hash() into the provenance.
GeneratedGraph generate(const GenSpec& spec);

std::string to_string(Model model);
Model model_from_string(const std::string& name);

}  // namespace outbreak
