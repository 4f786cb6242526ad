#pragma once

#include <cstdint>
#include <variant>
#include <vector>

#include "pomp/graph.hpp"
#include "pomp/random.hpp"

namespace pomp {

// Path length is either fixed, or drawn per path from weights over {1..n}
// where `weights[i]` is the weight of length i + 1.
struct FixedLength {
  std::size_t m = 2;
};
struct SampledLength {
  std::vector<double> weights;
};
using PathLength = std::variant<FixedLength, SampledLength>;

struct SamplerConfig {
  std::size_t paths_per_instance = 3;  // K
  PathLength path_length = FixedLength{2};
  std::uint64_t rng_seed = 0;
};

// Throws invalid_config when the config cannot be satisfied by `graph`.
void validate(const SamplerConfig& config, const MetaGraph& graph);

// K paths, each drawn sequentially without replacement with weights
// proportional to the current auxiliary probabilities.
std::vector<TranslationPath> sample_paths(const MetaGraph& graph, const SamplerConfig& config, Rng& rng);

// The single path of length m that takes the m most probable auxiliaries in
// descending order (ties keep graph order).
TranslationPath greedy_path(const MetaGraph& graph, std::size_t m);

}  // namespace pomp
