#pragma once

#include <unistd.h>

#include <atomic>
#include <filesystem>
#include <string>
#include <vector>

#include "pomp/corpus.hpp"
#include "pomp/graph.hpp"

namespace pomp::test {

inline std::filesystem::path fixture(const std::string& name) {
  return std::filesystem::path(POMP_TEST_DATA) / name;
}

// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  TempDir() {
    static std::atomic<int> counter{0};
    path_ = std::filesystem::temp_directory_path() /
            ("pomp-test-" + std::to_string(::getpid()) + "-" + std::to_string(counter++));
    std::filesystem::remove_all(path_);
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }
  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
};

inline LanguageId lang(const std::string& code, const std::string& name = "") {
  return {code, name.empty() ? code : name};
}

inline MetaGraph make_graph(const std::vector<std::pair<std::string, double>>& probs) {
  std::vector<std::pair<LanguageId, double>> init;
  for (const auto& [code, p] : probs) init.emplace_back(lang(code), p);
  return build_meta_graph(lang("en", "English"), lang("gu", "Gujarati"), init);
}

inline ExampleRecord make_record(const std::string& id, const std::vector<std::string>& aux_codes,
                                 bool with_gold = true) {
  ExampleRecord r;
  r.id = id;
  r.source_sentence = "source sentence " + id;
  for (const auto& c : aux_codes) r.aux_translations[c] = c + " text " + id;
  r.initial_translation = "initial translation " + id;
  r.pseudo_reference = "pseudo reference " + id;
  if (with_gold) r.gold_reference = "gold reference " + id;
  return r;
}

inline Dataset make_dataset(const std::vector<std::string>& aux_codes, std::size_t n, bool with_gold = true) {
  Dataset ds;
  ds.source = lang("en", "English");
  ds.target = lang("gu", "Gujarati");
  for (const auto& c : aux_codes) ds.aux_langs.push_back(lang(c));
  for (std::size_t i = 0; i < n; ++i) ds.records.push_back(make_record("r" + std::to_string(i), aux_codes, with_gold));
  return ds;
}

}  // namespace pomp::test
