#pragma once

#include <cstdint>

// Reproducible random streams.
//
// All randomness in this library flows through xoshiro256++ instances whose
// seeds are derived from a single master seed with the splitmix64 finalizer.
// Logical stream i of master seed m is seeded by
//
//     mix64(m + (i + 1) * 0x9E3779B97F4A7C15)
//
// which is the documented stream-derivation function: any consumer (chunked
// batch generation, per-horizon sweeps) that needs independent streams uses
// derive_stream_seed and nothing else. Doubles are produced from the top 53
// bits, so results do not depend on the platform's distribution library.

namespace latbox {

// splitmix64 finalizer (Steele, Lea, Flood / Vigna).
inline constexpr std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

inline constexpr std::uint64_t splitmix64_next(std::uint64_t& state) {
  return mix64(state += 0x9E3779B97F4A7C15ULL);
}

inline constexpr std::uint64_t derive_stream_seed(std::uint64_t master,
                                                  std::uint64_t stream) {
  return mix64(master + (stream + 1) * 0x9E3779B97F4A7C15ULL);
}

// xoshiro256++ 1.0 (Blackman, Vigna), state expanded from a 64-bit seed via
// splitmix64 as its authors recommend.
class Xoshiro256pp {
 public:
  explicit constexpr Xoshiro256pp(std::uint64_t seed) {
    std::uint64_t s = seed;
    for (auto& word : state_) word = splitmix64_next(s);
    if ((state_[0] | state_[1] | state_[2] | state_[3]) == 0) state_[0] = 1;
  }

  constexpr std::uint64_t next() {
    const std::uint64_t result = rotl(state_[0] + state_[3], 23) + state_[0];
    const std::uint64_t t = state_[1] << 17;
    state_[2] ^= state_[0];
    state_[3] ^= state_[1];
    state_[1] ^= state_[2];
    state_[0] ^= state_[3];
    state_[2] ^= t;
    state_[3] = rotl(state_[3], 45);
    return result;
  }

  // Uniform double in [0, 1) with 53 random bits.
  constexpr double uniform01() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

 private:
  static constexpr std::uint64_t rotl(std::uint64_t x, int k) {
    return (x << k) | (x >> (64 - k));
  }
  std::uint64_t state_[4]{};
};

// Recorded in batch metadata so outputs identify how they were produced.
inline constexpr const char* kGeneratorName =
    "xoshiro256++ 1.0 (splitmix64-derived streams)";

}  // namespace latbox
