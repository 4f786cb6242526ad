#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace pomp {

// mt19937_64 is fully specified by the standard; the distribution helpers
// below are hand-rolled so that replays are identical across standard
// library implementations.
using Rng = std::mt19937_64;

std::uint64_t splitmix64(std::uint64_t x);

// Seed of the labeled sub-stream `label`/`index` under `root`.
std::uint64_t derive_seed(std::uint64_t root, std::string_view label, std::uint64_t index = 0);

inline Rng make_stream(std::uint64_t root, std::string_view label, std::uint64_t index = 0) {
  return Rng(derive_seed(root, label, index));
}

// Uniform in [0, 1) with 53 bits of precision.
double uniform01(Rng& rng);

// Uniform in {0, ..., n-1}; n must be positive.
std::uint64_t uniform_index(Rng& rng, std::uint64_t n);

// Box-Muller, one variate per call.
double standard_normal(Rng& rng);

}  // namespace pomp
