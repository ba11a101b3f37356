#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>

namespace regulattice {

using Rng = std::mt19937_64;

/// Derives a stream seed from a master seed and a tuple of coordinates, so
/// per-block randomness is independent of evaluation order.
inline std::uint64_t derive_seed(std::uint64_t master, std::initializer_list<std::uint64_t> coords) {
  auto mix = [](std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  };
  std::uint64_t h = mix(master);
  for (std::uint64_t c : coords) h = mix(h ^ mix(c));
  return h;
}

}  // namespace regulattice
