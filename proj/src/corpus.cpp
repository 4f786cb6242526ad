#include "pomp/corpus.hpp"

#include <algorithm>
#include <numeric>
#include <set>

#include <json.hpp>

#include "detail.hpp"
#include "pomp/error.hpp"

namespace pomp {

using nlohmann::ordered_json;

const char* to_string(Split split) {
  switch (split) {
    case Split::train_pool: return "train_pool";
    case Split::train_stream: return "train_stream";
    case Split::test: return "test";
  }
  return "unknown";
}

Split parse_split(std::string_view text) {
  if (text == "train_pool") return Split::train_pool;
  if (text == "train_stream") return Split::train_stream;
  if (text == "test") return Split::test;
  throw Error(ErrorKind::invalid_input, "unknown split '" + std::string(text) + "'");
}

const LanguageId& Dataset::aux_lang(std::string_view code) const {
  for (const auto& l : aux_langs) {
    if (l.code == code) return l;
  }
  throw Error(ErrorKind::invalid_input, "dataset does not declare auxiliary '" + std::string(code) + "'");
}

namespace {

LanguageId language_from(const ordered_json& j) {
  LanguageId l{j.at("code").get<std::string>(), j.at("display_name").get<std::string>()};
  validate_language(l);
  return l;
}

ordered_json language_json(const LanguageId& l) { return {{"code", l.code}, {"display_name", l.display_name}}; }

std::string required_string(const ordered_json& j, const char* key) {
  if (!j.contains(key)) throw std::runtime_error(std::string("missing required field '") + key + "'");
  const auto& v = j.at(key);
  if (!v.is_string()) throw std::runtime_error(std::string("field '") + key + "' must be a string");
  return v.get<std::string>();
}

}  // namespace

Dataset parse_dataset(std::string_view text, std::string_view origin) {
  Dataset ds;
  std::vector<std::string> problems;
  std::set<std::string> ids;
  std::set<std::string> declared;
  bool have_header = false;
  std::size_t line_no = 0;
  std::size_t start = 0;
  while (start < text.size()) {
    auto nl = text.find('\n', start);
    if (nl == std::string_view::npos) nl = text.size();
    const std::string_view line = text.substr(start, nl - start);
    start = nl + 1;
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string_view::npos) continue;
    const std::string where = "line " + std::to_string(line_no) + ": ";

    ordered_json j;
    try {
      j = ordered_json::parse(line);
    } catch (const std::exception&) {
      problems.push_back(where + "not valid JSON");
      continue;
    }

    if (!have_header) {
      have_header = true;
      try {
        if (j.value("format", "") != "pomp-dataset") throw std::runtime_error("not a dataset header");
        if (j.value("version", -1) != kDatasetVersion) {
          throw Error(ErrorKind::schema_version, std::string(origin) + ": unsupported dataset version");
        }
        ds.split = parse_split(j.value("split", "train_stream"));
        ds.source = language_from(j.at("source"));
        ds.target = language_from(j.at("target"));
        for (const auto& a : j.at("aux_langs")) {
          ds.aux_langs.push_back(language_from(a));
          if (!declared.insert(ds.aux_langs.back().code).second) {
            problems.push_back(where + "auxiliary '" + ds.aux_langs.back().code + "' declared twice");
          }
        }
        if (ds.source.code == ds.target.code) problems.push_back(where + "source equals target");
        if (declared.count(ds.source.code) || declared.count(ds.target.code)) {
          problems.push_back(where + "an auxiliary collides with source or target");
        }
      } catch (const Error& e) {
        if (e.kind() == ErrorKind::schema_version) throw;
        problems.push_back(where + e.what());
        break;
      } catch (const std::exception& e) {
        problems.push_back(where + "bad header: " + e.what());
        break;
      }
      continue;
    }

    try {
      ExampleRecord r;
      r.id = required_string(j, "id");
      if (r.id.empty()) throw std::runtime_error("empty id");
      r.source_sentence = required_string(j, "source");
      if (r.source_sentence.empty()) throw std::runtime_error("empty source sentence");
      r.initial_translation = required_string(j, "initial");
      r.pseudo_reference = required_string(j, "pseudo_ref");
      if (j.contains("gold_ref") && !j.at("gold_ref").is_null()) r.gold_reference = required_string(j, "gold_ref");
      if (!j.contains("aux") || !j.at("aux").is_object()) throw std::runtime_error("missing required field 'aux'");
      for (const auto& [code, val] : j.at("aux").items()) {
        if (!declared.count(code)) throw std::runtime_error("unknown language code '" + code + "'");
        if (!val.is_string() || val.get<std::string>().empty()) {
          throw std::runtime_error("empty translation for '" + code + "'");
        }
        r.aux_translations[code] = val.get<std::string>();
      }
      for (const auto& code : declared) {
        if (!r.aux_translations.count(code)) throw std::runtime_error("lacks the '" + code + "' translation");
      }
      if (!ids.insert(r.id).second) throw std::runtime_error("duplicate id '" + r.id + "'");
      ds.records.push_back(std::move(r));
    } catch (const std::exception& e) {
      problems.push_back(where + e.what());
    }
  }
  if (!have_header && problems.empty()) problems.push_back("missing dataset header");
  if (!problems.empty()) {
    std::string msg = std::string(origin) + ": " + std::to_string(problems.size()) + " problem(s)";
    for (const auto& p : problems) msg += "\n  " + p;
    throw Error(ErrorKind::load, msg);
  }
  return ds;
}

Dataset load_dataset(const std::filesystem::path& path) {
  return parse_dataset(detail::read_file(path), path.string());
}

std::string serialize_dataset(const Dataset& ds) {
  ordered_json header{{"format", "pomp-dataset"}, {"version", kDatasetVersion}, {"split", to_string(ds.split)},
                      {"source", language_json(ds.source)}, {"target", language_json(ds.target)}};
  header["aux_langs"] = ordered_json::array();
  for (const auto& l : ds.aux_langs) header["aux_langs"].push_back(language_json(l));
  std::string out = header.dump() + "\n";
  for (const auto& r : ds.records) {
    ordered_json j{{"id", r.id}, {"source", r.source_sentence}};
    j["aux"] = ordered_json::object();
    for (const auto& [code, text] : r.aux_translations) j["aux"][code] = text;
    j["initial"] = r.initial_translation;
    j["pseudo_ref"] = r.pseudo_reference;
    if (r.gold_reference) j["gold_ref"] = *r.gold_reference;
    out += j.dump() + "\n";
  }
  return out;
}

void save_dataset(const Dataset& dataset, const std::filesystem::path& path) {
  detail::write_file_atomic(path, serialize_dataset(dataset));
}

bool shot_eligible(const ExampleRecord& record, std::span<const std::string> required_langs) {
  if (!record.gold_reference || record.gold_reference->empty()) return false;
  return std::all_of(required_langs.begin(), required_langs.end(),
                     [&](const std::string& code) { return record.aux_translations.count(code) > 0; });
}

std::vector<ExampleRecord> draw_shots(const Dataset& pool, std::size_t k, std::span<const std::string> required_langs,
                                      Rng& rng, std::string_view exclude_id) {
  if (k == 0) return {};
  std::vector<std::size_t> eligible;
  for (std::size_t i = 0; i < pool.records.size(); ++i) {
    const auto& r = pool.records[i];
    if (r.id != exclude_id && shot_eligible(r, required_langs)) eligible.push_back(i);
  }
  if (eligible.size() < k) {
    throw Error(ErrorKind::pool_exhausted, "need " + std::to_string(k) + " shot examples but only " +
                                               std::to_string(eligible.size()) + " are eligible");
  }
  // Partial Fisher-Yates.
  std::vector<ExampleRecord> shots;
  shots.reserve(k);
  for (std::size_t i = 0; i < k; ++i) {
    const std::size_t j = i + static_cast<std::size_t>(uniform_index(rng, eligible.size() - i));
    std::swap(eligible[i], eligible[j]);
    shots.push_back(pool.records[eligible[i]]);
  }
  return shots;
}

}  // namespace pomp
