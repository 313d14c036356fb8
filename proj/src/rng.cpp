#include "outbreak/rng.hpp"

namespace outbreak {

Seed derive_seed(Seed master, std::string_view name, std::uint64_t index) noexcept {
  auto le64 = [](std::uint64_t x, std::uint64_t state) {
    for (int i = 0; i < 8; ++i) {
      state ^= (x >> (8 * i)) & 0xFFu;
      state *= 0x100000001B3ULL;
    }
    return state;
  };
  std::uint64_t h = le64(master, 0xCBF29CE484222325ULL);
  h = fnv1a64(name, h);
  h = le64(index, h);
  return mix64(h);
}

}  // namespace outbreak
