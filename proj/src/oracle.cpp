#include "pomp/oracle.hpp"

#include <algorithm>
#include <cmath>

#include <json.hpp>

#include "detail.hpp"
#include "pomp/error.hpp"

namespace pomp {

void validate(const OracleSpec& spec) {
  if (spec.utilities.empty()) throw Error(ErrorKind::invalid_config, "oracle spec has no utilities");
  double max_u = 0.0;
  for (const auto& [code, u] : spec.utilities) {
    if (!(u >= 0.0 && u <= 1.0)) throw Error(ErrorKind::invalid_config, "utility of '" + code + "' outside [0, 1]");
    max_u = std::max(max_u, u);
  }
  if (!(spec.base_score >= 0.0 && spec.base_score <= 1.0)) {
    throw Error(ErrorKind::invalid_config, "base score outside [0, 1]");
  }
  if (spec.base_score + max_u > 1.0) throw Error(ErrorKind::invalid_config, "base score + max utility exceeds 1");
  if (!(spec.noise_std >= 0.0 && spec.noise_std < 0.5)) {
    throw Error(ErrorKind::invalid_config, "noise std must lie in [0, 0.5)");
  }
}

OracleSpec load_oracle_spec(const std::filesystem::path& path) {
  const auto text = detail::read_file(path);
  OracleSpec spec;
  try {
    const auto j = nlohmann::json::parse(text);
    spec.utilities = j.at("utilities").get<std::map<std::string, double>>();
    spec.base_score = j.value("base_score", spec.base_score);
    spec.noise_std = j.value("noise_std", spec.noise_std);
    spec.rng_seed = j.value("rng_seed", spec.rng_seed);
  } catch (const std::exception& e) {
    throw Error(ErrorKind::invalid_config, path.string() + ": bad oracle spec: " + e.what());
  }
  validate(spec);
  return spec;
}

PathScores oracle_scores(const TranslationPath& path, const OracleSpec& spec, Rng& rng) {
  if (path.vertices.empty()) throw Error(ErrorKind::invalid_input, "empty path");
  PathScores s;
  double sum = 0.0;
  for (const auto& v : path.vertices) {
    const auto it = spec.utilities.find(v.code);
    if (it == spec.utilities.end()) throw Error(ErrorKind::invalid_input, "no utility for '" + v.code + "'");
    const double eps = spec.noise_std > 0.0 ? spec.noise_std * standard_normal(rng) : 0.0;
    s.vertex.push_back(std::clamp(spec.base_score + it->second + eps, 0.0, 1.0));
    sum += it->second;
  }
  const double eps = spec.noise_std > 0.0 ? spec.noise_std * standard_normal(rng) : 0.0;
  s.aggregate = std::clamp(spec.base_score + sum / static_cast<double>(path.vertices.size()) + eps, 0.0, 1.0);
  return s;
}

SimulationResult simulate(MetaGraph graph, const OracleSpec& spec, const SimulationConfig& config, bool keep_traces,
                          const std::function<void(const InstanceTrace&)>& on_instance) {
  validate(spec);
  validate(config.sampler, graph);
  validate(config.evolution);
  const std::uint64_t noise_root = derive_seed(config.root_seed, "oracle", spec.rng_seed);
  SimulationResult result;
  for (std::uint64_t t = 0; t < config.horizon; ++t) {
    InstanceTrace trace;
    const bool tracing = keep_traces || on_instance;
    if (tracing) {
      trace.index = t;
      trace.record_id = "synthetic-" + std::to_string(t);
      trace.probabilities_before = probability_snapshot(graph);
      trace.revision_before = graph.revision;
    }
    auto sample_rng = make_stream(config.root_seed, "sample", t);
    auto noise_rng = make_stream(noise_root, "noise", t);
    const auto paths = sample_paths(graph, config.sampler, sample_rng);
    const double lr = learning_rate(t, config.evolution);
    for (const auto& path : paths) {
      const auto scores = oracle_scores(path, spec, noise_rng);
      const auto rv = compute_rewards(scores, config.evolution.attribution);
      if (lr > 0.0) graph = apply_update(graph, path, rv.rewards, lr, config.evolution.p_min);
      if (tracing) {
        PathOutcome po;
        for (const auto& v : path.vertices) po.vertices.push_back(v.code);
        po.joint_probability = path.joint_probability;
        po.aggregate_score = scores.aggregate;
        po.vertex_scores = scores.vertex;
        po.contributions = rv.contributions;
        po.rewards = rv.rewards;
        po.learning_rate = lr;
        po.updated = lr > 0.0;
        trace.paths.push_back(std::move(po));
      }
    }
    if (tracing) {
      trace.probabilities_after = probability_snapshot(graph);
      trace.revision_after = graph.revision;
      if (on_instance) on_instance(trace);
      if (keep_traces) result.traces.push_back(std::move(trace));
    }
  }
  result.graph = std::move(graph);
  return result;
}

std::optional<std::string> strict_top_language(const MetaGraph& graph) {
  if (graph.auxiliaries.empty()) return std::nullopt;
  std::size_t best = 0;
  bool tie = false;
  for (std::size_t i = 1; i < graph.auxiliaries.size(); ++i) {
    const double p = graph.auxiliaries[i].probability;
    const double b = graph.auxiliaries[best].probability;
    if (p > b) {
      best = i;
      tie = false;
    } else if (p == b) {
      tie = true;
    }
  }
  if (tie) return std::nullopt;
  return graph.auxiliaries[best].language.code;
}

}  // namespace pomp
