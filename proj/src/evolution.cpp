#include "pomp/evolution.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "detail.hpp"
#include "pomp/error.hpp"

namespace pomp {

EvolutionConfig default_evolution_config(std::uint64_t horizon) {
  EvolutionConfig c;
  c.horizon = horizon;
  c.decay_tau = std::max(1.0, 0.1 * static_cast<double>(horizon));
  return c;
}

void validate(const EvolutionConfig& c) {
  if (!(c.learning_rate_initial > 0.0) || !std::isfinite(c.learning_rate_initial)) {
    throw Error(ErrorKind::invalid_config, "initial learning rate must be positive");
  }
  if (c.schedule == LearningRateSchedule::inverse_decay && !(c.decay_tau > 0.0)) {
    throw Error(ErrorKind::invalid_config, "decay tau must be positive");
  }
  if (c.schedule == LearningRateSchedule::linear_to_zero && c.horizon == 0) {
    throw Error(ErrorKind::invalid_config, "linear schedule needs a positive horizon");
  }
  if (!(c.p_min > 0.0) || c.p_min > 1.0) throw Error(ErrorKind::invalid_config, "p_min must lie in (0, 1]");
}

std::vector<double> attribute_contributions(const PathScores& scores, AttributionMode mode) {
  const std::size_t m = scores.vertex.size();
  if (m == 0) throw Error(ErrorKind::invalid_input, "path scores have no vertices");
  if (!std::isfinite(scores.aggregate)) throw Error(ErrorKind::invalid_input, "aggregate score is not finite");
  std::vector<double> gaps(m);
  for (std::size_t i = 0; i < m; ++i) {
    if (!std::isfinite(scores.vertex[i])) throw Error(ErrorKind::invalid_input, "vertex score is not finite");
    gaps[i] = scores.aggregate - scores.vertex[i];
  }
  if (m == 1) return {gaps[0]};

  const double total = std::accumulate(gaps.begin(), gaps.end(), 0.0);
  const double denom = static_cast<double>(m - 1);
  std::vector<double> d(m);
  for (std::size_t i = 0; i < m; ++i) {
    d[i] = mode == AttributionMode::as_printed ? (total - gaps[i]) / denom : total / denom - gaps[i];
  }
  return d;
}

double sigmoid(double x) {
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

double cs_swish(double x) {
  if (!std::isfinite(x)) throw Error(ErrorKind::invalid_input, "cs-Swish of a non-finite value");
  if (x > 0.0) return x * sigmoid(x);
  return -((-x) * sigmoid(-x));
}

double reward(double contribution) { return cs_swish(contribution); }

RewardVector compute_rewards(const PathScores& scores, AttributionMode mode) {
  RewardVector rv;
  rv.contributions = attribute_contributions(scores, mode);
  rv.rewards.reserve(rv.contributions.size());
  for (double d : rv.contributions) rv.rewards.push_back(reward(d));
  return rv;
}

MetaGraph apply_update(const MetaGraph& graph, const TranslationPath& path, std::span<const double> rewards,
                       double learning_rate, double p_min) {
  if (rewards.size() != path.vertices.size()) {
    throw Error(ErrorKind::invalid_input, "got " + std::to_string(rewards.size()) + " rewards for a path of " +
                                              std::to_string(path.vertices.size()) + " vertices");
  }
  if (!(learning_rate > 0.0) || !std::isfinite(learning_rate)) {
    throw Error(ErrorKind::invalid_input, "learning rate must be positive");
  }
  MetaGraph next = graph;
  for (std::size_t i = 0; i < rewards.size(); ++i) {
    if (!std::isfinite(rewards[i])) throw Error(ErrorKind::invalid_input, "reward is not finite");
    const auto idx = next.index_of(path.vertices[i].code);
    if (!idx) {
      throw Error(ErrorKind::invalid_input, "path vertex '" + path.vertices[i].code + "' is not in the graph");
    }
    auto& aux = next.auxiliaries[*idx];
    aux.probability = std::clamp((1.0 + learning_rate * rewards[i]) * aux.probability, p_min, 1.0);
    ++aux.update_count;
  }
  ++next.revision;
  return next;
}

double learning_rate(std::uint64_t t, const EvolutionConfig& config) {
  const double lr0 = config.learning_rate_initial;
  const double td = static_cast<double>(t);
  switch (config.schedule) {
    case LearningRateSchedule::inverse_decay:
      return lr0 / (1.0 + td / config.decay_tau);
    case LearningRateSchedule::linear_to_zero:
      return lr0 * std::max(0.0, 1.0 - td / static_cast<double>(config.horizon));
  }
  return lr0;
}

}  // namespace pomp
