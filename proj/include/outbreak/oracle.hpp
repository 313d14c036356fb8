#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

#include "json.hpp"
#include "outbreak/graph.hpp"

namespace outbreak {

using Rational = boost::multiprecision::cpp_rational;

inline constexpr std::size_t kOracleEdgeCap = 24;

class OracleCapError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Law of an integer outcome over all 2^m bond masks. counts[i][j] is the
/// number of masks with j open edges whose outcome is support[i], so the
/// law is exact for every p at once.
struct ExactLaw {
  std::size_t num_edges = 0;
  double p = 0.0;
  std::vector<std::size_t> support;  // ascending, only outcomes that occur
  std::vector<double> probabilities;
  std::vector<std::vector<std::uint64_t>> counts;

  double probability_of(std::size_t value) const;
  double mean() const;
  // p = numerator / denominator evaluated without rounding.
  std::vector<Rational> rational(std::int64_t numerator, std::int64_t denominator) const;
  // Reweights the stored counts at another p.
  std::vector<double> at(double p) const;

  nlohmann::json to_json() const;  // {"1": 0.25, ...}
};

// Throws OracleCapError when m exceeds the cap.
ExactLaw exact_component_distribution(const Graph& g, Vertex v, double p);
ExactLaw exact_outbreak_distribution(const Graph& g, std::span<const Vertex> seeds, double p);
// Mass of masks in which C(v) contains a vertex at graph distance >= k from v.
double exact_zeta_k(const Graph& g, Vertex v, std::uint32_t k, double p);
ExactLaw exact_zeta_k_law(const Graph& g, Vertex v, std::uint32_t k, double p);

}  // namespace outbreak
