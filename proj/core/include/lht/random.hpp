#pragma once

#include <algorithm>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <vector>

namespace lht {

/// Derives child seeds from a master seed as outputs of a splitmix64 stream.
/// The k-th derived seed is finalize(seed + (k+1)*increment), which makes the
/// scheme reproducible from (seed, index) alone, with no generator state.
inline constexpr std::uint64_t kSplitMixIncrement = 0x9e3779b97f4a7c15ULL;

constexpr std::uint64_t splitmix_finalize(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

constexpr std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index) {
  return splitmix_finalize(seed + (index + 1) * kSplitMixIncrement);
}

/// Successor seed used when a seeded draw must be retried (e.g. a subsample
/// that lost a required class).
constexpr std::uint64_t next_seed(std::uint64_t seed) { return derive_seed(seed, 0); }

/// Uniform draw in [0, bound) by rejection, so results depend only on the
/// mt19937_64 stream and not on any library's distribution internals.
inline std::size_t uniform_index(std::mt19937_64& rng, std::size_t bound) {
  if (bound == 0) throw std::invalid_argument("uniform_index: bound must be positive");
  const std::uint64_t limit = UINT64_MAX - UINT64_MAX % bound;
  std::uint64_t draw = rng();
  while (draw >= limit) draw = rng();
  return static_cast<std::size_t>(draw % bound);
}

template <typename T>
void fisher_yates_shuffle(std::vector<T>& values, std::mt19937_64& rng) {
  for (std::size_t i = values.size(); i > 1; --i) {
    std::swap(values[i - 1], values[uniform_index(rng, i)]);
  }
}

/// Sorted uniform sample of `count` distinct indices from {0..population-1}.
inline std::vector<std::size_t> sample_without_replacement(std::size_t population,
                                                           std::size_t count,
                                                           std::uint64_t seed) {
  if (count > population) {
    throw std::invalid_argument("sample_without_replacement: count exceeds population");
  }
  std::vector<std::size_t> indices(population);
  for (std::size_t i = 0; i < population; ++i) indices[i] = i;
  std::mt19937_64 rng(seed);
  fisher_yates_shuffle(indices, rng);
  indices.resize(count);
  std::sort(indices.begin(), indices.end());
  return indices;
}

}  // namespace lht
