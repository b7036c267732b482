#pragma once

#include <cstdint>
#include <random>

namespace fjvrp {

// Seeded random source. Wraps std::mt19937_64 but derives floats and bounded
// integers by hand: the standard distributions are implementation-defined,
// and reproducible output across toolchains is part of the contract.
struct Rng {
  std::mt19937_64 gen;

  explicit Rng(std::uint64_t seed) : gen(seed) {}

  std::uint64_t next() { return gen(); }

  // Uniform in [0, 1).
  double unit() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  // Uniform integer in [0, n), n >= 1.
  std::uint64_t below(std::uint64_t n) { return next() % n; }
};

// splitmix64 finalizer; mixes two keys into one well-spread seed so that
// per-vehicle, per-day streams are independent of each other.
inline std::uint64_t mix_seed(std::uint64_t a, std::uint64_t b) {
  std::uint64_t z = a + 0x9e3779b97f4a7c15ull * (b + 0x632be59bd9b4e019ull);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

}  // namespace fjvrp
