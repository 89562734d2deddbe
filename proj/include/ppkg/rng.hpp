#pragma once

#include <cstdint>
#include <random>
#include <string>

#include "ppkg/fixed_point.hpp"

namespace ppkg {

// Deterministic PRG. Every random draw in a run descends from one seed via
// labelled sub-streams, which is what makes transcripts replayable.
class Prg {
 public:
  explicit Prg(uint64_t seed) : eng_(seed) {}

  uint64_t next_u64() { return eng_(); }

  RingValue next_ring() { return RingValue{next_u64()}; }

  // Uniform in [lo, hi] without std::uniform_int_distribution so the byte
  // stream does not depend on the standard library implementation.
  uint64_t next_range(uint64_t lo, uint64_t hi) {
    uint64_t span = hi - lo + 1;
    if (span == 0) return next_u64();  // full range
    uint64_t limit = UINT64_MAX - UINT64_MAX % span;
    uint64_t v;
    do {
      v = next_u64();
    } while (v >= limit);
    return lo + v % span;
  }

  double next_real(double lo, double hi) {
    double u = double(next_u64() >> 11) * 0x1.0p-53;
    return lo + u * (hi - lo);
  }

 private:
  std::mt19937_64 eng_;
};

// Derive an independent sub-stream seed from (seed, domain label, index).
inline uint64_t derive_seed(uint64_t seed, const std::string& domain,
                            uint64_t index = 0) {
  uint64_t h = 0xcbf29ce484222325ULL ^ seed;
  auto mix = [&h](uint64_t x) {
    h ^= x;
    h *= 0x100000001b3ULL;
    h ^= h >> 29;
    h *= 0xbf58476d1ce4e5b9ULL;
    h ^= h >> 32;
  };
  for (char c : domain) mix(uint64_t(uint8_t(c)));
  mix(index + 0x9e3779b97f4a7c15ULL);
  return h;
}

}  // namespace ppkg
