#include "pomp/sampler.hpp"

#include <algorithm>
#include <numeric>

#include "pomp/error.hpp"

namespace pomp {

void validate(const SamplerConfig& config, const MetaGraph& graph) {
  const std::size_t n = graph.auxiliaries.size();
  if (config.paths_per_instance < 1) throw Error(ErrorKind::invalid_config, "paths per instance must be >= 1");
  if (const auto* fixed = std::get_if<FixedLength>(&config.path_length)) {
    if (fixed->m < 1) throw Error(ErrorKind::invalid_config, "path length must be >= 1");
    if (fixed->m > n) {
      throw Error(ErrorKind::invalid_config, "path length " + std::to_string(fixed->m) + " exceeds the " +
                                                 std::to_string(n) + " auxiliary languages");
    }
    return;
  }
  const auto& w = std::get<SampledLength>(config.path_length).weights;
  if (w.empty() || w.size() > n) {
    throw Error(ErrorKind::invalid_config, "length distribution must cover 1.." + std::to_string(n) + " at most");
  }
  double total = 0.0;
  for (double x : w) {
    if (!(x >= 0.0)) throw Error(ErrorKind::invalid_config, "negative path-length weight");
    total += x;
  }
  if (!(total > 0.0)) throw Error(ErrorKind::invalid_config, "path-length weights sum to zero");
}

namespace {

// Index into `weights` drawn proportionally; zero-weight entries are never picked.
std::size_t weighted_pick(std::span<const double> weights, Rng& rng) {
  const double total = std::accumulate(weights.begin(), weights.end(), 0.0);
  const double u = uniform01(rng) * total;
  double acc = 0.0;
  std::size_t last_positive = 0;
  for (std::size_t i = 0; i < weights.size(); ++i) {
    if (weights[i] <= 0.0) continue;
    acc += weights[i];
    last_positive = i;
    if (u < acc) return i;
  }
  return last_positive;  // rounding at the top end
}

std::size_t draw_length(const PathLength& length, Rng& rng) {
  if (const auto* fixed = std::get_if<FixedLength>(&length)) return fixed->m;
  const auto& w = std::get<SampledLength>(length).weights;
  return weighted_pick(w, rng) + 1;
}

}  // namespace

std::vector<TranslationPath> sample_paths(const MetaGraph& graph, const SamplerConfig& config, Rng& rng) {
  validate(config, graph);
  const std::size_t n = graph.auxiliaries.size();
  std::vector<TranslationPath> paths;
  paths.reserve(config.paths_per_instance);
  std::vector<double> weights(n);
  for (std::size_t k = 0; k < config.paths_per_instance; ++k) {
    const std::size_t m = draw_length(config.path_length, rng);
    for (std::size_t i = 0; i < n; ++i) weights[i] = graph.auxiliaries[i].probability;
    TranslationPath path;
    std::vector<double> members;
    for (std::size_t step = 0; step < m; ++step) {
      const std::size_t pick = weighted_pick(weights, rng);
      path.vertices.push_back(graph.auxiliaries[pick].language);
      members.push_back(graph.auxiliaries[pick].probability);
      weights[pick] = 0.0;
    }
    path.joint_probability = joint_probability(members);
    paths.push_back(std::move(path));
  }
  return paths;
}

TranslationPath greedy_path(const MetaGraph& graph, std::size_t m) {
  if (m < 1 || m > graph.auxiliaries.size()) {
    throw Error(ErrorKind::invalid_config, "path length " + std::to_string(m) + " out of range");
  }
  std::vector<std::size_t> order(graph.auxiliaries.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return graph.auxiliaries[a].probability > graph.auxiliaries[b].probability;
  });
  TranslationPath path;
  std::vector<double> members;
  for (std::size_t i = 0; i < m; ++i) {
    path.vertices.push_back(graph.auxiliaries[order[i]].language);
    members.push_back(graph.auxiliaries[order[i]].probability);
  }
  path.joint_probability = joint_probability(members);
  return path;
}

}  // namespace pomp
