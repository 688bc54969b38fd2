#pragma once

#include <cstdint>
#include <random>

namespace propsim {

using Rng = std::mt19937_64;

// SplitMix64 finalizer.
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// Seed of replication `index` under `base`. Streams depend only on
// (base, index), never on scheduling.
constexpr std::uint64_t derive_seed(std::uint64_t base, std::uint64_t index) noexcept {
  return mix64(mix64(base) ^ mix64(index + 0x632be59bd9b4e019ULL));
}

inline Rng make_rng(std::uint64_t seed) { return Rng{mix64(seed)}; }

// Uniform on (0, 1]; safe to take the logarithm of.
inline double uniform_open0(Rng& rng) {
  return 1.0 - std::generate_canonical<double, 53>(rng);
}

inline double uniform01(Rng& rng) { return std::generate_canonical<double, 53>(rng); }

}  // namespace propsim
