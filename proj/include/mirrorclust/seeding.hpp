#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace mirrorclust {

/// splitmix64 finalizer.
constexpr std::uint64_t mix64(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// 64-bit FNV-1a; stable across platforms, unlike std::hash.
constexpr std::uint64_t fnv1a64(std::string_view s) noexcept {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (const char c : s) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001b3ULL;
  }
  return h;
}

/// Counter-based seed for task (id, index) under a run seed. Independent of
/// the order in which tasks execute.
constexpr std::uint64_t derive_seed(std::uint64_t seed, std::string_view id,
                                    std::uint64_t index) noexcept {
  return mix64(mix64(mix64(seed) ^ fnv1a64(id)) ^ index);
}

constexpr std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t a,
                                    std::uint64_t b) noexcept {
  return mix64(mix64(mix64(seed) ^ mix64(a)) ^ b);
}

/// Uniform double in [0, 1) from the top 53 bits. Bit-identical on every
/// platform, which std::uniform_real_distribution does not promise.
inline double uniform01(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

}  // namespace mirrorclust
