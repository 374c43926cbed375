#pragma once

#include <cstdint>
#include <random>
#include <vector>

namespace soficlab {

/// All randomness flows through mt19937_64 with hand-rolled bounded sampling:
/// std::uniform_int_distribution and std::shuffle are implementation-defined,
/// which would break byte-identical reruns across toolchains.
using Rng = std::mt19937_64;

/// Default per-run seed, recorded in every output that consumed randomness.
inline constexpr std::uint64_t kDefaultSeed = 1729;

/// Uniform draw from {0, ..., n-1} by unbiased rejection.
std::uint64_t uniform_below(Rng& rng, std::uint64_t n);

/// Fisher-Yates permutation of {0, ..., d-1}.
std::vector<std::uint32_t> random_permutation(Rng& rng, std::size_t d);

/// Uniform self-map image of {0, ..., d-1}.
std::vector<std::uint32_t> random_image(Rng& rng, std::size_t d);

/// Stateless per-index stream: deterministic and independent of how work is
/// sharded (sample i always sees the same generator state).
Rng stream_for_index(std::uint64_t seed, std::uint64_t index);

}  // namespace soficlab
