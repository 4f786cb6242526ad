#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace pomp {

class EmbeddingProvider;

inline constexpr double kDefaultProbabilityFloor = 1e-4;
inline constexpr int kCheckpointSchemaVersion = 1;

struct LanguageId {
  std::string code;          // lowercase tag, e.g. "gu"
  std::string display_name;  // used in prompt labels, e.g. "Gujarati"

  bool operator==(const LanguageId&) const = default;
};

// Throws invalid_input unless the code is a non-empty lowercase tag.
void validate_language(const LanguageId& language);

struct AuxLanguageState {
  LanguageId language;
  double probability = 1.0;
  std::uint64_t update_count = 0;

  bool operator==(const AuxLanguageState&) const = default;
};

// Seconds since the Unix epoch, UTC.
using Timestamp = std::int64_t;

Timestamp wall_clock_now();
std::string format_timestamp(Timestamp t);
Timestamp parse_timestamp(std::string_view text);

// Language-specific meta-graph. Only vertices are stored: the weight of an
// edge into auxiliary j after the prefix (v_1..v_k) is the geometric mean of
// the member probabilities, so paths are enumerated or sampled on demand.
struct MetaGraph {
  LanguageId source;
  LanguageId target;
  std::vector<AuxLanguageState> auxiliaries;
  Timestamp created_at = 0;
  Timestamp updated_at = 0;
  std::uint64_t revision = 0;

  std::optional<std::size_t> index_of(std::string_view code) const;
  const AuxLanguageState& aux(std::string_view code) const;
  double probability(std::string_view code) const;
  std::vector<double> probabilities() const;

  bool operator==(const MetaGraph&) const = default;
};

// Throws invariant_violation describing the first broken invariant.
void validate(const MetaGraph& graph, double p_min = 0.0);

struct TranslationPath {
  std::vector<LanguageId> vertices;  // auxiliaries only, source and target implied
  double joint_probability = 0.0;

  std::size_t length() const { return vertices.size(); }
  bool operator==(const TranslationPath&) const = default;
};

// "de>zh" style key, stable across runs.
std::string path_signature(const TranslationPath& path);

struct SentencePair {
  std::string source;
  std::string aux;
};
using SentencePairBatch = std::vector<SentencePair>;

// Initial auxiliary probability from pseudo-parallel pairs:
// exp(-1 + mean cosine), with each cosine clamped to [0, 1].
double compute_initial_probability(const SentencePairBatch& batch, EmbeddingProvider& embedder);

// Geometric mean (prod p_j)^(1/m), evaluated in log space.
double joint_probability(std::span<const double> probabilities);

MetaGraph build_meta_graph(const LanguageId& source, const LanguageId& target,
                           const std::vector<std::pair<LanguageId, double>>& init,
                           Timestamp now = 0);

// Versioned JSON checkpoint. Writes to a sibling temp file and renames, so an
// existing checkpoint survives a failed write.
void save_checkpoint(const MetaGraph& graph, const std::filesystem::path& path);
MetaGraph load_checkpoint(const std::filesystem::path& path, double p_min = 0.0);

}  // namespace pomp
