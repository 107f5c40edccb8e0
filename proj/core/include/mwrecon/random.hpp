#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>

namespace mwrecon {

/// One round of the splitmix64 finalizer.
constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Order-sensitive combination of seed material into a new seed.
constexpr std::uint64_t mix_seed(std::uint64_t seed, std::initializer_list<std::uint64_t> parts) noexcept {
  std::uint64_t h = splitmix64(seed);
  for (auto p : parts) h = splitmix64(h ^ splitmix64(p));
  return h;
}

/// Uniform double in [0, 1) from the top 53 bits; identical on every platform.
inline double uniform01(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

}  // namespace mwrecon
