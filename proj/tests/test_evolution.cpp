#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>

#include "pomp/error.hpp"
#include "pomp/evolution.hpp"
#include "pomp/random.hpp"
#include "support.hpp"

using namespace pomp;
using pomp::test::lang;
using pomp::test::make_graph;

namespace {

// Solves E - e_i = sum_{j != i} d_j, i.e. (J - I) d = E - e.
std::vector<double> solve_system(const PathScores& s) {
  const auto m = static_cast<Eigen::Index>(s.vertex.size());
  const Eigen::MatrixXd A = Eigen::MatrixXd::Ones(m, m) - Eigen::MatrixXd::Identity(m, m);
  Eigen::VectorXd b(m);
  for (Eigen::Index i = 0; i < m; ++i) b(i) = s.aggregate - s.vertex[static_cast<std::size_t>(i)];
  const Eigen::VectorXd d = A.fullPivLu().solve(b);
  return {d.data(), d.data() + m};
}

TranslationPath path_of(std::initializer_list<const char*> codes) {
  TranslationPath p;
  for (const char* c : codes) p.vertices.push_back(lang(c));
  return p;
}

}  // namespace

TEST_SUITE("evolution") {

TEST_CASE("attribution at m=2 agrees across modes") {
  const PathScores s{0.8, {0.7, 0.6}};
  for (auto mode : {AttributionMode::as_printed, AttributionMode::exact_system}) {
    const auto d = attribute_contributions(s, mode);
    REQUIRE(d.size() == 2);
    CHECK(d[0] == doctest::Approx(0.2).epsilon(1e-12));
    CHECK(d[1] == doctest::Approx(0.1).epsilon(1e-12));
  }
}

TEST_CASE("attribution at m=3") {
  const PathScores s{0.9, {0.8, 0.7, 0.6}};
  const auto printed = attribute_contributions(s, AttributionMode::as_printed);
  CHECK(printed[0] == doctest::Approx(0.25).epsilon(1e-12));
  CHECK(printed[1] == doctest::Approx(0.20).epsilon(1e-12));
  CHECK(printed[2] == doctest::Approx(0.15).epsilon(1e-12));
  const auto exact = attribute_contributions(s, AttributionMode::exact_system);
  const auto solved = solve_system(s);
  CHECK(exact[0] == doctest::Approx(0.2).epsilon(1e-12));
  CHECK(exact[1] == doctest::Approx(0.1).epsilon(1e-12));
  CHECK(std::abs(exact[2]) < 1e-12);
  for (std::size_t i = 0; i < 3; ++i) CHECK(exact[i] == doctest::Approx(solved[i]).epsilon(1e-12));
}

TEST_CASE("single vertex gets the whole gap") {
  for (auto mode : {AttributionMode::as_printed, AttributionMode::exact_system}) {
    const auto d = attribute_contributions({0.8, {0.7}}, mode);
    REQUIRE(d.size() == 1);
    CHECK(d[0] == doctest::Approx(0.1).epsilon(1e-12));
  }
  CHECK_THROWS_AS(attribute_contributions({0.8, {}}, AttributionMode::as_printed), Error);
  CHECK_THROWS_AS(attribute_contributions({NAN, {0.1}}, AttributionMode::as_printed), Error);
}

TEST_CASE("exact_system satisfies the pairwise identity") {
  Rng rng(4);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t m = 2 + uniform_index(rng, 5);
    PathScores s{uniform01(rng), {}};
    for (std::size_t i = 0; i < m; ++i) s.vertex.push_back(uniform01(rng));
    const auto d = attribute_contributions(s, AttributionMode::exact_system);
    for (std::size_t i = 0; i < m; ++i) {
      double others = 0.0;
      for (std::size_t j = 0; j < m; ++j) {
        if (j != i) others += d[j];
      }
      CHECK(std::abs((s.aggregate - s.vertex[i]) - others) < 1e-12);
    }
  }
}

TEST_CASE("cs-Swish values") {
  CHECK(cs_swish(0.0) == 0.0);
  CHECK(cs_swish(1.0) == doctest::Approx(0.73106).epsilon(1e-5));
  CHECK(cs_swish(-1.0) == doctest::Approx(-0.73106).epsilon(1e-5));
  CHECK(cs_swish(-3.0) == -cs_swish(3.0));
  CHECK(cs_swish(800.0) == doctest::Approx(800.0));
  CHECK(cs_swish(-800.0) == doctest::Approx(-800.0));
  CHECK_THROWS_AS(cs_swish(INFINITY), Error);
  CHECK(sigmoid(-800.0) == 0.0);
  CHECK(sigmoid(0.0) == 0.5);
}

TEST_CASE("reward keeps the sign of the contribution") {
  CHECK(reward(0.0) == 0.0);
  CHECK(reward(0.2) == doctest::Approx(0.10997).epsilon(1e-4));
  CHECK(reward(-0.2) == doctest::Approx(-0.10997).epsilon(1e-4));
  CHECK(reward(0.1) == doctest::Approx(0.052498).epsilon(1e-4));
}

TEST_CASE("compute_rewards chains attribution and reward") {
  const auto rv = compute_rewards({0.8, {0.7, 0.6}}, AttributionMode::as_printed);
  CHECK(rv.contributions.size() == 2);
  CHECK(rv.rewards[0] == doctest::Approx(0.2 / (1 + std::exp(-0.2))).epsilon(1e-12));
  CHECK(rv.rewards[1] == doctest::Approx(0.1 / (1 + std::exp(-0.1))).epsilon(1e-12));
}

TEST_CASE("probability update") {
  auto g = make_graph({{"de", 0.5}, {"hi", 0.3}, {"zh", 0.95}});
  const std::vector<double> neg{-0.5};
  const auto g1 = apply_update(g, path_of({"de"}), neg, 0.2);
  CHECK(g1.probability("de") == doctest::Approx(0.45).epsilon(1e-15));
  CHECK(g1.probability("hi") == 0.3);
  CHECK(g1.revision == g.revision + 1);
  CHECK(g1.aux("de").update_count == 1);
  CHECK(g1.aux("hi").update_count == 0);

  const std::vector<double> zero{0.0, 0.0};
  const auto g2 = apply_update(g, path_of({"de", "hi"}), zero, 0.3);
  CHECK(g2.probabilities() == g.probabilities());

  const std::vector<double> up{0.2};
  CHECK(apply_update(g, path_of({"zh"}), up, 1.0).probability("zh") == 1.0);

  const std::vector<double> crash{-1.0};
  CHECK(apply_update(g, path_of({"hi"}), crash, 1.0).probability("hi") == kDefaultProbabilityFloor);
}

TEST_CASE("update errors") {
  auto g = make_graph({{"de", 0.5}});
  const std::vector<double> one{0.1}, two{0.1, 0.1};
  CHECK_THROWS_AS(apply_update(g, path_of({"de"}), two, 0.1), Error);
  CHECK_THROWS_AS(apply_update(g, path_of({"de"}), one, 0.0), Error);
  CHECK_THROWS_AS(apply_update(g, path_of({"xx"}), one, 0.1), Error);
}

TEST_CASE("learning-rate schedules") {
  EvolutionConfig c;
  c.learning_rate_initial = 0.5;
  c.decay_tau = 100;
  CHECK(learning_rate(0, c) == 0.5);
  CHECK(learning_rate(100, c) == doctest::Approx(0.25));
  c.schedule = LearningRateSchedule::linear_to_zero;
  c.horizon = 1000;
  CHECK(learning_rate(1000, c) == 0.0);
  CHECK(learning_rate(500, c) == doctest::Approx(0.25));
  CHECK(default_evolution_config(500).decay_tau == 50.0);
  CHECK(default_evolution_config(0).decay_tau == 1.0);
}

TEST_CASE("config validation") {
  EvolutionConfig c;
  CHECK_NOTHROW(validate(c));
  c.p_min = 0.0;
  CHECK_THROWS_AS(validate(c), Error);
  c = {};
  c.learning_rate_initial = -1;
  CHECK_THROWS_AS(validate(c), Error);
  c = {};
  c.schedule = LearningRateSchedule::linear_to_zero;
  c.horizon = 0;
  CHECK_THROWS_AS(validate(c), Error);
}

}
