#pragma once

// Few-shot prompt rendering.
//
// Grammar (one field per line, examples separated by a blank line, query last):
//
//   <{Source} source>: {text}
//   <{Aux} translation>: {text}          zero or more, in path order
//   <{Target} translation>: {text}       initial (or refined) translation
//   <Refined translation>: {text}        empty in the query
//
// The query's final slot is rendered as "<Refined translation>:" (or
// "<{Target} translation>:" for the translation baseline) with no trailing
// whitespace or newline.

#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "pomp/graph.hpp"
#include "pomp/record.hpp"

namespace pomp {

struct PromptLanguages {
  LanguageId source;
  LanguageId target;
};

struct PromptOptions {
  std::string preamble;  // optional instruction placed before the first example
};

enum class PromptKind { generate, aggregate, trans, refine };

const char* to_string(PromptKind kind);

std::string build_generate_prompt(const PromptLanguages& langs, const LanguageId& vertex,
                                  std::span<const ExampleRecord> shots, const ExampleRecord& query,
                                  std::string_view initial_translation, const PromptOptions& options = {});

std::string build_aggregate_prompt(const PromptLanguages& langs, std::span<const LanguageId> path,
                                   std::span<const ExampleRecord> shots, const ExampleRecord& query,
                                   std::string_view refined_translation, const PromptOptions& options = {});

// Shots show (source, target translation); the target translation of a shot
// is its initial translation, as in the published baseline prompt.
std::string build_trans_prompt(const PromptLanguages& langs, std::span<const ExampleRecord> shots,
                               const ExampleRecord& query, const PromptOptions& options = {});

std::string build_refine_prompt(const PromptLanguages& langs, std::span<const ExampleRecord> shots,
                                const ExampleRecord& query, const PromptOptions& options = {});

struct PromptRequest {
  PromptKind kind = PromptKind::generate;
  std::vector<ExampleRecord> shots;
  ExampleRecord query;
  std::vector<LanguageId> languages;  // one vertex for generate, the path for aggregate, empty otherwise
  std::string query_translation;      // initial (generate) or refined (aggregate) text for the query
};

std::string render(const PromptLanguages& langs, const PromptRequest& request, const PromptOptions& options = {});

}  // namespace pomp
