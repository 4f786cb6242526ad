#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "pomp/evolution.hpp"
#include "pomp/graph.hpp"
#include "pomp/random.hpp"
#include "pomp/sampler.hpp"
#include "pomp/trace.hpp"

namespace pomp {

// Synthetic stand-in for LLM + scorer: each auxiliary has a fixed utility.
//   e_i = clamp(base + utility(v_i) + eps_i, 0, 1)
//   E   = clamp(base + mean utility over the path + eps, 0, 1)
// with eps ~ Normal(0, noise_std).
struct OracleSpec {
  std::map<std::string, double> utilities;
  double base_score = 0.5;
  double noise_std = 0.0;
  std::uint64_t rng_seed = 0;
};

void validate(const OracleSpec& spec);

// JSON: {"utilities":{"de":0.4,...},"base_score":0.3,"noise_std":0.05,"rng_seed":7}
OracleSpec load_oracle_spec(const std::filesystem::path& path);

PathScores oracle_scores(const TranslationPath& path, const OracleSpec& spec, Rng& rng);

struct SimulationConfig {
  SamplerConfig sampler;
  EvolutionConfig evolution;
  std::uint64_t horizon = 500;
  std::uint64_t root_seed = 0;
};

struct SimulationResult {
  MetaGraph graph;
  std::vector<InstanceTrace> traces;  // filled only when requested
};

// The training loop with the oracle in place of prompting and scoring.
SimulationResult simulate(MetaGraph graph, const OracleSpec& spec, const SimulationConfig& config,
                          bool keep_traces = false,
                          const std::function<void(const InstanceTrace&)>& on_instance = {});

// Code of the auxiliary with the strictly highest probability, if unique.
std::optional<std::string> strict_top_language(const MetaGraph& graph);

}  // namespace pomp
