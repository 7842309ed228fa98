#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>

namespace slowent {

/// The library's only bit source. std::mt19937_64 is fully specified by the
/// standard, so streams are identical across platforms.
using Rng = std::mt19937_64;

/// splitmix64 finalizer.
constexpr std::uint64_t mix64(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Derives the sub-seed of `lane` under `seed`. Used for Product
/// generators, per-column stacking streams and Monte Carlo replicas, so
/// parallel generation reproduces serial generation exactly.
constexpr std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t lane) noexcept {
  return mix64(mix64(seed) ^ (lane * 0xd6e8feb86659fd93ULL + 0x632be59bd9b4e019ULL));
}

constexpr std::uint64_t derive_seed(std::uint64_t seed,
                                    std::initializer_list<std::uint64_t> lanes) noexcept {
  for (auto lane : lanes) seed = derive_seed(seed, lane);
  return seed;
}

/// Uniform integer in [0, bound) by rejection; bound must be positive.
inline std::uint64_t uniform_below(Rng& rng, std::uint64_t bound) {
  const std::uint64_t limit = bound * ((~std::uint64_t{0}) / bound);
  std::uint64_t x = rng();
  while (x >= limit) x = rng();
  return x % bound;
}

/// Uniform double in [0, 1) with 53 random bits.
inline double uniform01(Rng& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

}  // namespace slowent
