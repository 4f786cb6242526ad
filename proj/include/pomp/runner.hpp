#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "pomp/corpus.hpp"
#include "pomp/evaluator.hpp"
#include "pomp/evolution.hpp"
#include "pomp/graph.hpp"
#include "pomp/llm.hpp"
#include "pomp/prompt.hpp"
#include "pomp/sampler.hpp"
#include "pomp/trace.hpp"

namespace pomp {

enum class InferencePath {
  best_sampled,  // highest joint probability among K freshly sampled paths
  greedy,        // the m most probable auxiliaries, no sampling
};

struct RunConfig {
  SamplerConfig sampler;
  EvolutionConfig evolution;
  std::size_t k_shot = 4;
  std::uint64_t horizon = 0;
  std::uint64_t root_seed = 0;
  std::uint64_t checkpoint_every = 0;  // 0: only at the end
  std::string model_name;
  int max_output_tokens = 256;
  double temperature = 0.0;
  PromptOptions prompt;
  InferencePath inference = InferencePath::best_sampled;
  bool parallel_calls = true;
};

void validate(const RunConfig& config, const MetaGraph& graph);

struct Providers {
  CompletionProvider& llm;
  Scorer& scorer;
};

struct InstanceResult {
  MetaGraph graph;
  InstanceTrace trace;
};

// One pass of sample -> Generate per distinct vertex -> best-of ->
// Aggregate per path -> score -> per-path update (in sampling order).
// `index` is the instance's position in the stream; it selects the random
// sub-streams and the learning rate.
InstanceResult train_instance(const ExampleRecord& record, std::uint64_t index, const MetaGraph& graph,
                              const Dataset& pool, const RunConfig& config, Providers providers);

struct TrainOptions {
  std::optional<std::filesystem::path> checkpoint_path;
  std::optional<std::filesystem::path> trace_path;
  std::uint64_t start_offset = 0;          // resume position in the stream
  std::function<Timestamp()> clock;        // stamps updated_at when set
  std::function<void(const InstanceTrace&)> on_instance;
};

struct TrainResult {
  MetaGraph graph;
  std::vector<InstanceTrace> traces;
};

// Folds train_instance over instances [start_offset, horizon). Instance t
// uses stream record t mod |stream|.
TrainResult train(const Dataset& stream, const Dataset& pool, MetaGraph graph, const RunConfig& config,
                  Providers providers, const TrainOptions& options = {});

struct InferenceResult {
  std::string text;
  TranslationPath path;
  std::string refined_text;
  bool fallback = false;  // Aggregate failed; `text` is the refined Generate output
  InstanceTrace trace;
};

// Read-only use of the trained graph.
InferenceResult infer(const ExampleRecord& record, std::uint64_t index, const MetaGraph& graph, const Dataset& pool,
                      const RunConfig& config, Providers providers);

enum class BaselineKind { trans, refine };

const char* to_string(BaselineKind kind);

struct BaselineEntry {
  std::string id;
  std::string output;
  std::optional<double> score;
  std::string reference;  // "gold" or "pseudo"
  std::string error;
};

struct BaselineReport {
  BaselineKind kind = BaselineKind::trans;
  std::vector<BaselineEntry> entries;
  std::optional<double> mean;  // undefined when nothing was scored
  std::vector<std::string> warnings;
};

BaselineReport run_baseline(BaselineKind kind, const Dataset& test, const Dataset& pool, const RunConfig& config,
                            Providers providers);

}  // namespace pomp
