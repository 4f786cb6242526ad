#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "pomp/graph.hpp"

namespace pomp {

// Aggregate score E of a path and the Generate score e_i of each vertex,
// in path order.
struct PathScores {
  double aggregate = 0.0;
  std::vector<double> vertex;
};

struct RewardVector {
  std::vector<double> contributions;  // d_i
  std::vector<double> rewards;        // r_i
};

// How a path's Aggregate score is split across its vertices.
//  as_printed:   d_i = (sum_j (E - e_j) - (E - e_i)) / (m - 1)
//  exact_system: d_i = sum_j (E - e_j) / (m - 1) - (E - e_i), the solution
//                of E - e_i = sum_{j != i} d_j for every i.
// Both reduce to d_1 = E - e_1 for a single-vertex path.
enum class AttributionMode { as_printed, exact_system };

enum class LearningRateSchedule { inverse_decay, linear_to_zero };

struct EvolutionConfig {
  double learning_rate_initial = 0.5;
  LearningRateSchedule schedule = LearningRateSchedule::inverse_decay;
  double decay_tau = 100.0;     // inverse decay: lr0 / (1 + t / tau)
  std::uint64_t horizon = 1000;  // linear: lr0 * (1 - t / horizon)
  AttributionMode attribution = AttributionMode::as_printed;
  double p_min = kDefaultProbabilityFloor;
};

// Inverse decay with tau = 0.1 * horizon.
EvolutionConfig default_evolution_config(std::uint64_t horizon);

void validate(const EvolutionConfig& config);

std::vector<double> attribute_contributions(const PathScores& scores, AttributionMode mode);

double sigmoid(double x);

// Odd extension of Swish: x * sigmoid(x) for x > 0, -Swish(-x) otherwise.
double cs_swish(double x);

// Reward for a contribution; sign-preserving (see cs_swish).
double reward(double contribution);

RewardVector compute_rewards(const PathScores& scores, AttributionMode mode);

// p_new = clamp((1 + lr * r_i) * p_old, p_min, 1) for each path vertex.
// Revision is bumped once; other auxiliaries are left untouched.
MetaGraph apply_update(const MetaGraph& graph, const TranslationPath& path, std::span<const double> rewards,
                       double learning_rate, double p_min = kDefaultProbabilityFloor);

double learning_rate(std::uint64_t t, const EvolutionConfig& config);

}  // namespace pomp
