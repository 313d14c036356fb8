#pragma once

#include <compare>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "outbreak/graph.hpp"
#include "outbreak/rng.hpp"

namespace outbreak {

enum class ExpansionMode { kEdge, kVertex };

// Non-negative rational boundary/size, compared exactly.
struct Ratio {
  std::uint64_t numerator = 0;
  std::uint64_t denominator = 1;

  double value() const noexcept {
    return static_cast<double>(numerator) / static_cast<double>(denominator);
  }
  friend std::strong_ordering operator<=>(const Ratio& a, const Ratio& b) noexcept {
    const auto lhs = static_cast<unsigned __int128>(a.numerator) * b.denominator;
    const auto rhs = static_cast<unsigned __int128>(b.numerator) * a.denominator;
    return lhs <=> rhs;
  }
  friend bool operator==(const Ratio& a, const Ratio& b) noexcept {
    return (a <=> b) == std::strong_ordering::equal;
  }
};

/// Large-set expansion witness: the minimum (or, for the heuristic, an
/// upper bound on the minimum) of boundary(A)/|A| over ceil(eps*n) <= |A| <=
/// floor(n/2), where boundary is e(A, V\A) in edge mode and the outer vertex
/// boundary in vertex mode.
struct ExpansionReport {
  double epsilon = 0.0;
  ExpansionMode mode = ExpansionMode::kEdge;
  Ratio value;
  std::vector<Vertex> witness;  // sorted
  bool exact = false;
};

struct SizeWindow {
  std::size_t lo = 0;
  std::size_t hi = 0;
};

// ceil(eps*n) .. floor(n/2). eps*n is nudged down by 1e-9 before the ceiling
// so that e.g. eps = 1/3, n = 6 gives 2 rather than 3. Throws when eps is
// outside (0, 1/2) or the window is empty.
SizeWindow expansion_window(std::size_t n, double eps);

class ExpansionCapError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

inline constexpr std::size_t kExactExpansionCap = 20;

// Subset enumeration. Refuses graphs above `cap` vertices.
ExpansionReport expansion_exact(const Graph& g, double eps, ExpansionMode mode,
                                std::size_t cap = kExactExpansionCap);

// Fiedler-vector sweep cut followed by randomized local moves, spending at
// most `budget` move evaluations. The result is feasible, so its value bounds
// the true minimum from above. When the graph is within the exact cap and the
// budget covers all 2^n subsets the search degenerates to enumeration.
ExpansionReport expansion_heuristic(const Graph& g, double eps, ExpansionMode mode,
                                    std::uint64_t budget, Seed seed = 0);

}  // namespace outbreak
