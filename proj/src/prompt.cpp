#include "pomp/prompt.hpp"

#include "pomp/error.hpp"

namespace pomp {

const char* to_string(PromptKind kind) {
  switch (kind) {
    case PromptKind::generate: return "generate";
    case PromptKind::aggregate: return "aggregate";
    case PromptKind::trans: return "trans";
    case PromptKind::refine: return "refine";
  }
  return "unknown";
}

namespace {

constexpr std::string_view kRefinedLabel = "<Refined translation>:";

void append_field(std::string& out, std::string_view label, std::string_view text) {
  out += label;
  out += ' ';
  out += text;
  out += '\n';
}

std::string source_label(const PromptLanguages& langs) { return "<" + langs.source.display_name + " source>:"; }

std::string translation_label(const LanguageId& lang) { return "<" + lang.display_name + " translation>:"; }

[[noreturn]] void missing(const ExampleRecord& r, const std::string& what) {
  throw Error(ErrorKind::missing_field, "example '" + r.id + "' lacks " + what);
}

const std::string& require_text(const ExampleRecord& r, const std::string& text, const char* what) {
  if (text.empty()) missing(r, what);
  return text;
}

const std::string& aux_text(const ExampleRecord& r, const LanguageId& lang) {
  const auto it = r.aux_translations.find(lang.code);
  if (it == r.aux_translations.end() || it->second.empty()) missing(r, "a " + lang.display_name + " translation");
  return it->second;
}

const std::string& gold_text(const ExampleRecord& r) {
  if (!r.gold_reference || r.gold_reference->empty()) missing(r, "a refined reference translation");
  return *r.gold_reference;
}

// Shared layout of the Generate, Aggregate and refine prompts.
std::string render_refinement(const PromptLanguages& langs, std::span<const LanguageId> aux,
                              std::span<const ExampleRecord> shots, const ExampleRecord& query,
                              std::string_view query_translation, const PromptOptions& options) {
  const std::string src = source_label(langs);
  const std::string tgt = translation_label(langs.target);
  std::vector<std::string> aux_labels;
  for (const auto& a : aux) aux_labels.push_back(translation_label(a));

  std::string out;
  if (!options.preamble.empty()) {
    out += options.preamble;
    out += "\n\n";
  }
  for (const auto& shot : shots) {
    append_field(out, src, require_text(shot, shot.source_sentence, "a source sentence"));
    for (std::size_t i = 0; i < aux.size(); ++i) append_field(out, aux_labels[i], aux_text(shot, aux[i]));
    append_field(out, tgt, require_text(shot, shot.initial_translation, "an initial translation"));
    append_field(out, kRefinedLabel, gold_text(shot));
    out += '\n';
  }
  append_field(out, src, require_text(query, query.source_sentence, "a source sentence"));
  for (std::size_t i = 0; i < aux.size(); ++i) append_field(out, aux_labels[i], aux_text(query, aux[i]));
  append_field(out, tgt, query_translation);
  out += kRefinedLabel;
  return out;
}

}  // namespace

std::string build_generate_prompt(const PromptLanguages& langs, const LanguageId& vertex,
                                  std::span<const ExampleRecord> shots, const ExampleRecord& query,
                                  std::string_view initial_translation, const PromptOptions& options) {
  if (initial_translation.empty()) missing(query, "an initial translation");
  return render_refinement(langs, std::span<const LanguageId>(&vertex, 1), shots, query, initial_translation,
                           options);
}

std::string build_aggregate_prompt(const PromptLanguages& langs, std::span<const LanguageId> path,
                                   std::span<const ExampleRecord> shots, const ExampleRecord& query,
                                   std::string_view refined_translation, const PromptOptions& options) {
  if (path.empty()) throw Error(ErrorKind::invalid_input, "aggregate prompt needs a non-empty path");
  if (refined_translation.empty()) {
    throw Error(ErrorKind::invalid_input, "aggregate query '" + query.id + "' has an empty refined translation");
  }
  return render_refinement(langs, path, shots, query, refined_translation, options);
}

std::string build_refine_prompt(const PromptLanguages& langs, std::span<const ExampleRecord> shots,
                                const ExampleRecord& query, const PromptOptions& options) {
  const auto& initial = require_text(query, query.initial_translation, "an initial translation");
  return render_refinement(langs, {}, shots, query, initial, options);
}

std::string build_trans_prompt(const PromptLanguages& langs, std::span<const ExampleRecord> shots,
                               const ExampleRecord& query, const PromptOptions& options) {
  const std::string src = source_label(langs);
  const std::string tgt = translation_label(langs.target);
  std::string out;
  if (!options.preamble.empty()) {
    out += options.preamble;
    out += "\n\n";
  }
  for (const auto& shot : shots) {
    append_field(out, src, require_text(shot, shot.source_sentence, "a source sentence"));
    append_field(out, tgt, require_text(shot, shot.initial_translation, "a target translation"));
    out += '\n';
  }
  append_field(out, src, require_text(query, query.source_sentence, "a source sentence"));
  out += tgt;
  return out;
}

std::string render(const PromptLanguages& langs, const PromptRequest& request, const PromptOptions& options) {
  switch (request.kind) {
    case PromptKind::generate:
      if (request.languages.size() != 1) {
        throw Error(ErrorKind::invalid_input, "generate prompt takes exactly one auxiliary language");
      }
      return build_generate_prompt(langs, request.languages.front(), request.shots, request.query,
                                   request.query_translation, options);
    case PromptKind::aggregate:
      return build_aggregate_prompt(langs, request.languages, request.shots, request.query,
                                    request.query_translation, options);
    case PromptKind::trans:
      return build_trans_prompt(langs, request.shots, request.query, options);
    case PromptKind::refine:
      return build_refine_prompt(langs, request.shots, request.query, options);
  }
  throw Error(ErrorKind::invalid_input, "unknown prompt kind");
}

}  // namespace pomp
