#pragma once

#include <cassert>
#include <cstdint>
#include <random>

namespace annembed {

// Deterministic draw helpers on top of mt19937_64. The standard <random>
// distributions are implementation-defined, so the few draws we need are
// spelled out here and produce the same stream everywhere.
class Rng {
 public:
  explicit Rng(uint64_t seed) : engine_(seed) {}

  uint64_t next() { return engine_(); }

  // Uniform integer in [0, n), free of modulo bias.
  uint64_t below(uint64_t n) {
    assert(n >= 1);
    const uint64_t threshold = (~n + 1) % n;  // 2^64 mod n
    for (;;) {
      uint64_t r = next();
      if (r >= threshold) return r % n;
    }
  }

  // Uniform double in [0, 1) with 53 random bits.
  double real01() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

 private:
  std::mt19937_64 engine_;
};

}  // namespace annembed
