#pragma once

#include <cstdint>

namespace grouptest {

// SplitMix64: fixed-increment 64-bit generator (Steele, Lea & Flood 2014).
// Used as the per-replicate stream engine; streams are derived from a
// master seed by a counter-based split, so replicate i always sees the
// same values no matter how replicates are scheduled across workers.
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next() {
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  // Uniform in [0, 1).
  double next_double() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  // Uniform in (0, 1); never returns an endpoint.
  double next_double_open() {
    return (static_cast<double>(next() >> 11) + 0.5) * 0x1.0p-53;
  }

 private:
  std::uint64_t state_;
};

inline std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// Stream for replicate/trial `index` under `master_seed`.
inline SplitMix64 replicate_stream(std::uint64_t master_seed, std::uint64_t index) {
  return SplitMix64(mix64(master_seed + 0x9e3779b97f4a7c15ULL * (index + 1)));
}

}  // namespace grouptest
