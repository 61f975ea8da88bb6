#pragma once

#include <cstdint>

namespace sofent {

// splitmix64 stream (Steele/Lea/Flood mix). Every randomized object in the
// library draws from this generator so identical seeds reproduce identical
// runs on any platform; std::uniform_* is avoided on purpose since its
// output is implementation defined.
struct SeededRng {
  std::uint64_t state;

  explicit SeededRng(std::uint64_t seed) : state(seed) {}

  static constexpr const char* name() { return "splitmix64-v1"; }

  std::uint64_t next() {
    std::uint64_t z = (state += 0x9E3779B97F4A7C15ull);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
  }

  // unbiased draw from [0, n) by rejection
  std::uint64_t below(std::uint64_t n) {
    if (n <= 1) return 0;
    std::uint64_t limit = ~std::uint64_t(0) - ~std::uint64_t(0) % n;
    std::uint64_t x;
    do {
      x = next();
    } while (x >= limit);
    return x % n;
  }

  static std::uint64_t mix(std::uint64_t a, std::uint64_t b) {
    SeededRng r(a ^ (b * 0xD1B54A32D192ED03ull + 0x8BB84B93962EACC9ull));
    r.next();
    return r.next();
  }

  // Per-rung stream: a function of (master seed, degree) only, so rungs can
  // be built in any order or in parallel without changing their contents.
  static SeededRng for_rung(std::uint64_t master_seed, std::uint64_t degree) {
    return SeededRng(mix(master_seed, degree));
  }
};

}  // namespace sofent
