#include "pomp/trace.hpp"

#include <fstream>

#include <json.hpp>

#include "detail.hpp"
#include "pomp/error.hpp"

namespace pomp {

using nlohmann::ordered_json;

std::map<std::string, double> probability_snapshot(const MetaGraph& graph) {
  std::map<std::string, double> out;
  for (const auto& a : graph.auxiliaries) out[a.language.code] = a.probability;
  return out;
}

namespace {

template <typename T>
ordered_json opt(const std::optional<T>& v) {
  return v ? ordered_json(*v) : ordered_json(nullptr);
}

template <typename T>
std::optional<T> opt_from(const ordered_json& j, const char* key) {
  if (!j.contains(key) || j.at(key).is_null()) return std::nullopt;
  return j.at(key).get<T>();
}

ordered_json snapshot_json(const std::map<std::string, double>& snap) {
  ordered_json j = ordered_json::object();
  for (const auto& [code, p] : snap) j[code] = detail::format_decimal(p);
  return j;
}

std::map<std::string, double> snapshot_from(const ordered_json& j) {
  std::map<std::string, double> out;
  for (const auto& [code, p] : j.items()) out[code] = detail::parse_decimal(p.get<std::string>());
  return out;
}

ordered_json language_json(const LanguageId& l) { return {{"code", l.code}, {"display_name", l.display_name}}; }

LanguageId language_from(const ordered_json& j) {
  return {j.at("code").get<std::string>(), j.at("display_name").get<std::string>()};
}

InstanceTrace instance_from(const ordered_json& j) {
  InstanceTrace t;
  t.index = j.at("index").get<std::uint64_t>();
  t.record_id = j.at("record_id").get<std::string>();
  for (const auto& g : j.at("generate")) {
    VertexOutcome v;
    v.code = g.at("code").get<std::string>();
    v.prompt_digest = g.at("prompt_digest").get<std::string>();
    v.output = opt_from<std::string>(g, "output");
    v.score = opt_from<double>(g, "score");
    v.error = g.value("error", "");
    t.generate.push_back(std::move(v));
  }
  t.refined_text = j.at("refined_text").get<std::string>();
  t.refined_label = j.at("refined_label").get<std::string>();
  t.refined_score = opt_from<double>(j, "refined_score");
  t.initial_score = opt_from<double>(j, "initial_score");
  for (const auto& p : j.at("paths")) {
    PathOutcome o;
    o.vertices = p.at("vertices").get<std::vector<std::string>>();
    o.joint_probability = p.at("joint_probability").get<double>();
    o.prompt_digest = p.at("prompt_digest").get<std::string>();
    o.output = opt_from<std::string>(p, "output");
    o.aggregate_score = opt_from<double>(p, "aggregate_score");
    o.vertex_scores = p.at("vertex_scores").get<std::vector<double>>();
    o.contributions = p.at("contributions").get<std::vector<double>>();
    o.rewards = p.at("rewards").get<std::vector<double>>();
    o.learning_rate = p.at("learning_rate").get<double>();
    o.updated = p.at("updated").get<bool>();
    o.skip_reason = p.value("skip_reason", "");
    t.paths.push_back(std::move(o));
  }
  t.probabilities_before = snapshot_from(j.at("probabilities_before"));
  t.probabilities_after = snapshot_from(j.at("probabilities_after"));
  t.revision_before = j.at("revision_before").get<std::uint64_t>();
  t.revision_after = j.at("revision_after").get<std::uint64_t>();
  t.warnings = j.at("warnings").get<std::vector<std::string>>();
  return t;
}

}  // namespace

std::string trace_header_line(const TraceHeader& header) {
  ordered_json j{{"format", "pomp-trace"}, {"version", kTraceVersion}, {"source", language_json(header.source)},
                 {"target", language_json(header.target)}};
  j["auxiliaries"] = ordered_json::array();
  for (const auto& a : header.auxiliaries) j["auxiliaries"].push_back(language_json(a));
  return j.dump();
}

std::string trace_line(const InstanceTrace& t) {
  ordered_json j;
  j["index"] = t.index;
  j["record_id"] = t.record_id;
  j["generate"] = ordered_json::array();
  for (const auto& v : t.generate) {
    j["generate"].push_back(ordered_json{{"code", v.code},
                                         {"prompt_digest", v.prompt_digest},
                                         {"output", opt(v.output)},
                                         {"score", opt(v.score)},
                                         {"error", v.error}});
  }
  j["refined_text"] = t.refined_text;
  j["refined_label"] = t.refined_label;
  j["refined_score"] = opt(t.refined_score);
  j["initial_score"] = opt(t.initial_score);
  j["paths"] = ordered_json::array();
  for (const auto& p : t.paths) {
    j["paths"].push_back(ordered_json{{"vertices", p.vertices},
                                      {"joint_probability", p.joint_probability},
                                      {"prompt_digest", p.prompt_digest},
                                      {"output", opt(p.output)},
                                      {"aggregate_score", opt(p.aggregate_score)},
                                      {"vertex_scores", p.vertex_scores},
                                      {"contributions", p.contributions},
                                      {"rewards", p.rewards},
                                      {"learning_rate", p.learning_rate},
                                      {"updated", p.updated},
                                      {"skip_reason", p.skip_reason}});
  }
  j["probabilities_before"] = snapshot_json(t.probabilities_before);
  j["probabilities_after"] = snapshot_json(t.probabilities_after);
  j["revision_before"] = t.revision_before;
  j["revision_after"] = t.revision_after;
  j["warnings"] = t.warnings;
  return j.dump();
}

TraceWriter::TraceWriter(std::filesystem::path path, const TraceHeader& header) : path_(std::move(path)) {
  std::error_code ec;
  const bool fresh = !std::filesystem::exists(path_, ec) || std::filesystem::file_size(path_, ec) == 0;
  if (fresh) {
    std::ofstream(path_, std::ios::trunc);
    detail::append_line(path_, trace_header_line(header));
  }
}

void TraceWriter::write(const InstanceTrace& trace) { detail::append_line(path_, trace_line(trace)); }

TraceLog read_trace(const std::filesystem::path& path) {
  const std::string text = detail::read_file(path);
  TraceLog log;
  std::size_t start = 0;
  std::size_t line_no = 0;
  while (start < text.size()) {
    auto nl = text.find('\n', start);
    if (nl == std::string::npos) nl = text.size();
    const std::string line = text.substr(start, nl - start);
    start = nl + 1;
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      const auto j = ordered_json::parse(line);
      if (!log.header) {
        if (j.value("format", "") != "pomp-trace") throw std::runtime_error("not a trace log");
        if (j.value("version", -1) != kTraceVersion) {
          throw Error(ErrorKind::schema_version, path.string() + ": unsupported trace version");
        }
        TraceHeader h;
        h.source = language_from(j.at("source"));
        h.target = language_from(j.at("target"));
        for (const auto& a : j.at("auxiliaries")) h.auxiliaries.push_back(language_from(a));
        log.header = std::move(h);
        continue;
      }
      log.instances.push_back(instance_from(j));
    } catch (const Error&) {
      throw;
    } catch (const std::exception& e) {
      throw Error(ErrorKind::load, path.string() + ":" + std::to_string(line_no) + ": " + e.what());
    }
  }
  return log;
}

}  // namespace pomp
