#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace bb84aes {

using Rng = std::mt19937_64;

namespace detail {

constexpr std::uint64_t fnv1a64(std::string_view text) noexcept {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (const char c : text) {
    h ^= static_cast<std::uint8_t>(c);
    h *= 0x100000001b3ULL;
  }
  return h;
}

constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

}  // namespace detail

/// Independent stream for `label` under `root_seed`. Streams never depend on
/// the order in which they are created, so sharding work cannot change draws.
inline Rng derive_stream(std::uint64_t root_seed, std::string_view label) {
  return Rng(detail::splitmix64(root_seed ^ detail::splitmix64(detail::fnv1a64(label))));
}

inline double uniform01(Rng& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

inline bool bernoulli(Rng& rng, double p) { return uniform01(rng) < p; }

inline std::uint8_t random_bit(Rng& rng) { return static_cast<std::uint8_t>(rng() >> 63); }

}  // namespace bb84aes
