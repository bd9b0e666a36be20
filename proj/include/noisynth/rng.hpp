#pragma once

#include <cstdint>
#include <initializer_list>

namespace noisynth {

// Deterministic 64-bit generator (SplitMix64). <random> distributions are
// implementation-defined, and reports must be byte-identical across
// platforms and thread counts, so all sampling goes through this class.
class Rng {
 public:
  explicit Rng(uint64_t seed) : state_(seed) {}

  uint64_t next_u64() {
    uint64_t z = (state_ += 0x9e3779b97f4a7c15ull);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
  }

  // Uniform in [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  // Uniform in [0, n), n >= 1. Multiply-shift with rejection; unbiased.
  uint64_t uniform_below(uint64_t n) {
    __uint128_t m = static_cast<__uint128_t>(next_u64()) * n;
    auto lo = static_cast<uint64_t>(m);
    if (lo < n) {
      uint64_t threshold = -n % n;
      while (lo < threshold) {
        m = static_cast<__uint128_t>(next_u64()) * n;
        lo = static_cast<uint64_t>(m);
      }
    }
    return static_cast<uint64_t>(m >> 64);
  }

  bool bernoulli(double p) { return uniform() < p; }

 private:
  uint64_t state_;
};

// Folds seed components into one stream seed, e.g. per-trial generators are
// seeded with mix_seed({master, n, trial}) so parallel and serial runs agree.
inline uint64_t mix_seed(std::initializer_list<uint64_t> parts) {
  Rng h(0x243f6a8885a308d3ull);
  uint64_t acc = h.next_u64();
  for (uint64_t p : parts) {
    Rng step(acc ^ p);
    acc = step.next_u64();
  }
  return acc;
}

}  // namespace noisynth
