#pragma once

#include <map>
#include <optional>
#include <string>

namespace pomp {

// One corpus row.
struct ExampleRecord {
  std::string id;
  std::string source_sentence;
  std::map<std::string, std::string> aux_translations;  // keyed by language code
  std::string initial_translation;
  std::string pseudo_reference;
  std::optional<std::string> gold_reference;

  bool operator==(const ExampleRecord&) const = default;
};

}  // namespace pomp
