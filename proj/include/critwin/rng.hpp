#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace critwin {

// One independent random stream per exploration or sample.
using Rng = std::mt19937_64;

namespace detail {

inline constexpr std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

inline constexpr std::uint64_t fnv1a(std::string_view s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (char c : s) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001b3ULL;
  }
  return h;
}

}  // namespace detail

/// Stable 64-bit seed for replicate `replicate` at size `n` of the family
/// named `tag`. Depends only on its arguments, so replicates can run in any
/// order or on any thread.
inline constexpr std::uint64_t derive_seed(std::uint64_t master, std::string_view tag,
                                           std::uint64_t n, std::uint64_t replicate) {
  std::uint64_t h = detail::splitmix64(master);
  h = detail::splitmix64(h ^ detail::fnv1a(tag));
  h = detail::splitmix64(h ^ n);
  h = detail::splitmix64(h ^ replicate);
  return h;
}

/// Uniform integer in [0, bound). bound must be positive.
template <class Urbg>
inline std::uint64_t uniform_below(Urbg& rng, std::uint64_t bound) {
  return std::uniform_int_distribution<std::uint64_t>(0, bound - 1)(rng);
}

}  // namespace critwin
