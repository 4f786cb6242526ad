#include "pomp/graph.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <ctime>
#include <set>

#include <json.hpp>

#include "detail.hpp"
#include "pomp/embedding.hpp"
#include "pomp/error.hpp"

namespace pomp {

using nlohmann::ordered_json;

void validate_language(const LanguageId& language) {
  if (language.code.empty()) throw Error(ErrorKind::invalid_input, "language code is empty");
  for (unsigned char c : language.code) {
    const bool ok = (c >= 'a' && c <= 'z') || (c >= '0' && c <= '9') || c == '-' || c == '_';
    if (!ok) {
      throw Error(ErrorKind::invalid_input, "language code '" + language.code + "' must be lowercase");
    }
  }
}

Timestamp wall_clock_now() {
  using namespace std::chrono;
  return duration_cast<seconds>(system_clock::now().time_since_epoch()).count();
}

std::string format_timestamp(Timestamp t) {
  const std::time_t tt = static_cast<std::time_t>(t);
  std::tm tm{};
  gmtime_r(&tt, &tm);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

Timestamp parse_timestamp(std::string_view text) {
  std::tm tm{};
  const std::string s(text);
  const char* end = strptime(s.c_str(), "%Y-%m-%dT%H:%M:%SZ", &tm);
  if (end == nullptr || *end != '\0') {
    throw Error(ErrorKind::invalid_input, "bad timestamp '" + s + "'");
  }
  return static_cast<Timestamp>(timegm(&tm));
}

std::optional<std::size_t> MetaGraph::index_of(std::string_view code) const {
  for (std::size_t i = 0; i < auxiliaries.size(); ++i) {
    if (auxiliaries[i].language.code == code) return i;
  }
  return std::nullopt;
}

const AuxLanguageState& MetaGraph::aux(std::string_view code) const {
  const auto i = index_of(code);
  if (!i) throw Error(ErrorKind::invalid_input, "language '" + std::string(code) + "' is not an auxiliary");
  return auxiliaries[*i];
}

double MetaGraph::probability(std::string_view code) const { return aux(code).probability; }

std::vector<double> MetaGraph::probabilities() const {
  std::vector<double> out;
  out.reserve(auxiliaries.size());
  for (const auto& a : auxiliaries) out.push_back(a.probability);
  return out;
}

void validate(const MetaGraph& graph, double p_min) {
  auto fail = [](const std::string& what) { throw Error(ErrorKind::invariant_violation, what); };
  try {
    validate_language(graph.source);
    validate_language(graph.target);
    for (const auto& a : graph.auxiliaries) validate_language(a.language);
  } catch (const Error& e) {
    fail(e.what());
  }
  if (graph.source.code == graph.target.code) fail("source and target are both '" + graph.source.code + "'");
  if (graph.auxiliaries.empty()) fail("graph has no auxiliary languages");
  std::set<std::string> seen;
  for (const auto& a : graph.auxiliaries) {
    const auto& code = a.language.code;
    if (code == graph.source.code || code == graph.target.code) {
      fail("auxiliary '" + code + "' collides with source or target");
    }
    if (!seen.insert(code).second) fail("duplicate auxiliary '" + code + "'");
    const double p = a.probability;
    if (!std::isfinite(p) || p <= 0.0 || p > 1.0 || p < p_min) {
      fail("probability of '" + code + "' is " + detail::format_decimal(p) + ", outside the valid range");
    }
  }
}

std::string path_signature(const TranslationPath& path) {
  std::string out;
  for (std::size_t i = 0; i < path.vertices.size(); ++i) {
    if (i) out += '>';
    out += path.vertices[i].code;
  }
  return out;
}

double compute_initial_probability(const SentencePairBatch& batch, EmbeddingProvider& embedder) {
  if (batch.empty()) throw Error(ErrorKind::invalid_input, "sentence-pair batch is empty");
  double sum = 0.0;
  for (std::size_t i = 0; i < batch.size(); ++i) {
    const auto& pair = batch[i];
    if (pair.source.empty() || pair.aux.empty()) {
      throw Error(ErrorKind::invalid_input, "sentence pair " + std::to_string(i) + " has an empty side");
    }
    EmbeddingPair emb;
    try {
      emb = embedder.encode(pair.source, pair.aux);
    } catch (const Error& e) {
      throw Error(e.kind(), "embedding pair " + std::to_string(i) + ": " + e.what());
    }
    if (emb.source.size() != emb.aux.size() || emb.source.size() == 0) {
      throw Error(ErrorKind::malformed_response,
                  "embedding pair " + std::to_string(i) + ": vectors have mismatched or zero dimension");
    }
    sum += std::clamp(cosine_similarity(emb.source, emb.aux), 0.0, 1.0);
  }
  const double mean = sum / static_cast<double>(batch.size());
  return std::exp(-1.0 + mean);
}

double joint_probability(std::span<const double> probabilities) {
  if (probabilities.empty()) throw Error(ErrorKind::invalid_input, "joint probability of an empty path");
  double log_sum = 0.0;
  for (double p : probabilities) {
    if (!(p > 0.0) || p > 1.0) {
      throw Error(ErrorKind::invalid_input, "probability " + detail::format_decimal(p) + " outside (0, 1]");
    }
    log_sum += std::log(p);
  }
  return std::exp(log_sum / static_cast<double>(probabilities.size()));
}

MetaGraph build_meta_graph(const LanguageId& source, const LanguageId& target,
                           const std::vector<std::pair<LanguageId, double>>& init, Timestamp now) {
  validate_language(source);
  validate_language(target);
  if (source.code == target.code) {
    throw Error(ErrorKind::invalid_input, "source and target are both '" + source.code + "'");
  }
  if (init.empty()) throw Error(ErrorKind::invalid_input, "no auxiliary languages given");
  MetaGraph g;
  g.source = source;
  g.target = target;
  g.created_at = now;
  g.updated_at = now;
  std::set<std::string> seen;
  for (const auto& [lang, p] : init) {
    validate_language(lang);
    if (lang.code == source.code || lang.code == target.code) {
      throw Error(ErrorKind::invalid_input, "auxiliary '" + lang.code + "' collides with source or target");
    }
    if (!seen.insert(lang.code).second) {
      throw Error(ErrorKind::invalid_input, "duplicate auxiliary language '" + lang.code + "'");
    }
    if (!std::isfinite(p) || p <= 0.0 || p > 1.0) {
      throw Error(ErrorKind::invalid_input,
                  "probability " + detail::format_decimal(p) + " for '" + lang.code + "' outside (0, 1]");
    }
    g.auxiliaries.push_back({lang, p, 0});
  }
  return g;
}

namespace {

ordered_json language_json(const LanguageId& l) {
  return ordered_json{{"code", l.code}, {"display_name", l.display_name}};
}

LanguageId language_from(const ordered_json& j) {
  return {j.at("code").get<std::string>(), j.at("display_name").get<std::string>()};
}

}  // namespace

void save_checkpoint(const MetaGraph& graph, const std::filesystem::path& path) {
  ordered_json j;
  j["schema_version"] = kCheckpointSchemaVersion;
  j["source"] = language_json(graph.source);
  j["target"] = language_json(graph.target);
  j["revision"] = graph.revision;
  j["created_at"] = format_timestamp(graph.created_at);
  j["updated_at"] = format_timestamp(graph.updated_at);
  auto aux = ordered_json::array();
  for (const auto& a : graph.auxiliaries) {
    aux.push_back(ordered_json{{"code", a.language.code},
                               {"display_name", a.language.display_name},
                               {"probability", detail::format_decimal(a.probability)},
                               {"update_count", a.update_count}});
  }
  j["auxiliaries"] = std::move(aux);
  detail::write_file_atomic(path, j.dump(2) + "\n");
}

MetaGraph load_checkpoint(const std::filesystem::path& path, double p_min) {
  const std::string text = detail::read_file(path);
  ordered_json j;
  try {
    j = ordered_json::parse(text);
  } catch (const std::exception& e) {
    throw Error(ErrorKind::load, path.string() + ": not valid JSON: " + e.what());
  }
  MetaGraph g;
  try {
    const int version = j.at("schema_version").get<int>();
    if (version != kCheckpointSchemaVersion) {
      throw Error(ErrorKind::schema_version, path.string() + ": unsupported schema_version " +
                                                 std::to_string(version));
    }
    g.source = language_from(j.at("source"));
    g.target = language_from(j.at("target"));
    g.revision = j.at("revision").get<std::uint64_t>();
    g.created_at = parse_timestamp(j.at("created_at").get<std::string>());
    g.updated_at = parse_timestamp(j.at("updated_at").get<std::string>());
    for (const auto& a : j.at("auxiliaries")) {
      AuxLanguageState s;
      s.language = {a.at("code").get<std::string>(), a.at("display_name").get<std::string>()};
      s.probability = detail::parse_decimal(a.at("probability").get<std::string>());
      s.update_count = a.at("update_count").get<std::uint64_t>();
      g.auxiliaries.push_back(std::move(s));
    }
  } catch (const Error&) {
    throw;
  } catch (const std::exception& e) {
    throw Error(ErrorKind::load, path.string() + ": malformed checkpoint: " + e.what());
  }
  validate(g, p_min);
  return g;
}

}  // namespace pomp
