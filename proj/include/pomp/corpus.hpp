#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "pomp/graph.hpp"
#include "pomp/random.hpp"
#include "pomp/record.hpp"

namespace pomp {

enum class Split { train_pool, train_stream, test };

const char* to_string(Split split);
Split parse_split(std::string_view text);

struct Dataset {
  LanguageId source;
  LanguageId target;
  std::vector<LanguageId> aux_langs;
  std::vector<ExampleRecord> records;
  Split split = Split::train_stream;

  const LanguageId& aux_lang(std::string_view code) const;
  bool operator==(const Dataset&) const = default;
};

inline constexpr int kDatasetVersion = 1;

// Line-delimited JSON. Line 1 is the header
//   {"format":"pomp-dataset","version":1,"split":"train_stream",
//    "source":{"code","display_name"},"target":{...},"aux_langs":[{...},...]}
// and every further non-blank line one record
//   {"id","source","aux":{"<code>":"<text>"},"initial","pseudo_ref","gold_ref"?}.
//
// Every offending line is reported in a single load error.
Dataset parse_dataset(std::string_view text, std::string_view origin = "<memory>");
Dataset load_dataset(const std::filesystem::path& path);
std::string serialize_dataset(const Dataset& dataset);
void save_dataset(const Dataset& dataset, const std::filesystem::path& path);

// Shot-eligible: carries a gold reference and every required auxiliary.
bool shot_eligible(const ExampleRecord& record, std::span<const std::string> required_langs);

// k distinct eligible records, uniform without replacement, excluding the
// record whose id is `exclude_id`.
std::vector<ExampleRecord> draw_shots(const Dataset& pool, std::size_t k, std::span<const std::string> required_langs,
                                      Rng& rng, std::string_view exclude_id = {});

}  // namespace pomp
