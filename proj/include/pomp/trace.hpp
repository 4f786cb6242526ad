#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "pomp/graph.hpp"

namespace pomp {

struct VertexOutcome {
  std::string code;
  std::string prompt_digest;
  std::optional<std::string> output;  // empty when the provider failed
  std::optional<double> score;        // e_i
  std::string error;
};

struct PathOutcome {
  std::vector<std::string> vertices;
  double joint_probability = 0.0;
  std::string prompt_digest;
  std::optional<std::string> output;
  std::optional<double> aggregate_score;  // E
  std::vector<double> vertex_scores;      // e_i in path order
  std::vector<double> contributions;      // d_i
  std::vector<double> rewards;            // r_i
  double learning_rate = 0.0;
  bool updated = false;
  std::string skip_reason;
};

// Audit record of one training (or simulated) instance.
struct InstanceTrace {
  std::uint64_t index = 0;
  std::string record_id;
  std::vector<VertexOutcome> generate;
  std::string refined_text;
  std::string refined_label;
  std::optional<double> refined_score;
  std::optional<double> initial_score;
  std::vector<PathOutcome> paths;
  std::map<std::string, double> probabilities_before;
  std::map<std::string, double> probabilities_after;
  std::uint64_t revision_before = 0;
  std::uint64_t revision_after = 0;
  std::vector<std::string> warnings;
};

std::map<std::string, double> probability_snapshot(const MetaGraph& graph);

inline constexpr int kTraceVersion = 1;

struct TraceHeader {
  LanguageId source;
  LanguageId target;
  std::vector<LanguageId> auxiliaries;
};

// Line-delimited JSON: a {"format":"pomp-trace","version":1,...} header line
// followed by one object per instance. Probabilities are decimal strings.
std::string trace_header_line(const TraceHeader& header);
std::string trace_line(const InstanceTrace& trace);

// Appends instances to a trace file, writing the header when the file is new
// or empty.
class TraceWriter {
 public:
  TraceWriter(std::filesystem::path path, const TraceHeader& header);
  void write(const InstanceTrace& trace);
  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
};

struct TraceLog {
  std::optional<TraceHeader> header;  // absent for an empty file
  std::vector<InstanceTrace> instances;
};

TraceLog read_trace(const std::filesystem::path& path);

}  // namespace pomp
