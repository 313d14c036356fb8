#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <string_view>
#include <utility>

namespace outbreak {

using Seed = std::uint64_t;

// SplitMix64 output finalizer. Every derived stream in the project goes
// through this function; see docs/SCHEMAS.md for the bit-exact recipe.
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

// 64-bit FNV-1a over the bytes of `data`, continuing from `state`.
constexpr std::uint64_t fnv1a64(std::string_view data,
                                std::uint64_t state = 0xCBF29CE484222325ULL) noexcept {
  for (unsigned char c : data) {
    state ^= c;
    state *= 0x100000001B3ULL;
  }
  return state;
}

// Substream seed for trial `index` of the stream called `name` under `master`:
// mix64(FNV-1a(le64(master) || name || le64(index))).
Seed derive_seed(Seed master, std::string_view name, std::uint64_t index) noexcept;

// Top 53 bits of `bits` mapped to [0, 1).
constexpr double unit_interval(std::uint64_t bits) noexcept {
  return static_cast<double>(bits >> 11) * 0x1.0p-53;
}

// Counter-based per-edge uniform for a stream. Thresholding this value at p
// gives the edge's percolation state, so one stream serves every p.
constexpr double edge_uniform(Seed stream, std::uint64_t edge_id) noexcept {
  return unit_interval(mix64(stream + (edge_id + 1) * 0x9E3779B97F4A7C15ULL));
}

// Seeded engine with platform-independent bounded draws (the standard
// distributions are implementation-defined, which would break
// cross-platform reproducibility).
class Rng {
 public:
  explicit Rng(Seed seed) : engine_(mix64(seed)) {}

  std::uint64_t next() { return engine_(); }

  double uniform() { return unit_interval(engine_()); }

  // Uniform integer in [0, bound). bound must be positive.
  std::uint64_t below(std::uint64_t bound) {
    // Lemire's multiply-shift with rejection.
    unsigned __int128 product = static_cast<unsigned __int128>(engine_()) * bound;
    auto low = static_cast<std::uint64_t>(product);
    if (low < bound) {
      const std::uint64_t threshold = (0 - bound) % bound;
      while (low < threshold) {
        product = static_cast<unsigned __int128>(engine_()) * bound;
        low = static_cast<std::uint64_t>(product);
      }
    }
    return static_cast<std::uint64_t>(product >> 64);
  }

  bool bernoulli(double p) { return uniform() < p; }

  template <typename T>
  void shuffle(std::span<T> items) {
    for (std::size_t i = items.size(); i > 1; --i) {
      const auto j = static_cast<std::size_t>(below(i));
      std::swap(items[i - 1], items[j]);
    }
  }

 private:
  std::mt19937_64 engine_;
};

}  // namespace outbreak
