#pragma once

// Seeded streams. A master seed is split into independent child seeds by
// (stream, index) so work scheduled in any order draws the same numbers.

#include <cstdint>
#include <random>

namespace lagp {

using Rng = std::mt19937_64;

namespace detail {

inline std::uint64_t splitmix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

}  // namespace detail

/// Child seed for item `index` of stream `stream` under `master`.
inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream,
                                 std::uint64_t index = 0) {
  return detail::splitmix64(detail::splitmix64(detail::splitmix64(master) ^ stream) ^ index);
}

inline Rng make_rng(std::uint64_t master, std::uint64_t stream, std::uint64_t index = 0) {
  return Rng(derive_seed(master, stream, index));
}

/// Stream tags used across the library, kept distinct so adding a consumer
/// never shifts another's draws.
namespace streams {
inline constexpr std::uint64_t design = 1;
inline constexpr std::uint64_t subsample = 2;
inline constexpr std::uint64_t paths = 3;
inline constexpr std::uint64_t draws = 4;
inline constexpr std::uint64_t folds = 5;
inline constexpr std::uint64_t replicate = 6;
inline constexpr std::uint64_t simulate = 7;
}  // namespace streams

}  // namespace lagp
