#include <doctest.h>

#include <cmath>
#include <map>
#include <numeric>
#include <set>

#include "pomp/error.hpp"
#include "pomp/sampler.hpp"
#include "support.hpp"

using namespace pomp;
using pomp::test::make_graph;

namespace {

// Exact probability of an ordered path under sequential weighted sampling
// without replacement, by direct product.
double path_probability(const std::vector<double>& p, const std::vector<std::size_t>& order) {
  double prob = 1.0;
  std::vector<bool> used(p.size(), false);
  for (std::size_t idx : order) {
    double rest = 0.0;
    for (std::size_t j = 0; j < p.size(); ++j) {
      if (!used[j]) rest += p[j];
    }
    prob *= p[idx] / rest;
    used[idx] = true;
  }
  return prob;
}

}  // namespace

TEST_SUITE("sampler") {

TEST_CASE("single auxiliary yields identical paths") {
  const auto g = make_graph({{"de", 0.7}});
  SamplerConfig cfg{3, FixedLength{1}, 0};
  Rng rng(1);
  const auto paths = sample_paths(g, cfg, rng);
  REQUIRE(paths.size() == 3);
  for (const auto& p : paths) {
    REQUIRE(p.vertices.size() == 1);
    CHECK(p.vertices[0].code == "de");
    CHECK(p.joint_probability == doctest::Approx(0.7).epsilon(1e-15));
  }
}

TEST_CASE("single-vertex frequencies follow the weights") {
  const auto g = make_graph({{"de", 0.8}, {"hi", 0.2}});
  SamplerConfig cfg{1, FixedLength{1}, 0};
  Rng rng(2024);
  int de = 0;
  for (int i = 0; i < 10000; ++i) de += sample_paths(g, cfg, rng)[0].vertices[0].code == "de";
  CHECK(std::abs(de / 10000.0 - 0.8) < 0.02);
}

TEST_CASE("two equal vertices: uniform first, forced second") {
  const auto g = make_graph({{"de", 0.5}, {"hi", 0.5}});
  SamplerConfig cfg{1, FixedLength{2}, 0};
  Rng rng(9);
  int de_first = 0;
  for (int i = 0; i < 10000; ++i) {
    const auto p = sample_paths(g, cfg, rng)[0];
    REQUIRE(p.vertices.size() == 2);
    CHECK(p.vertices[0].code != p.vertices[1].code);
    de_first += p.vertices[0].code == "de";
  }
  CHECK(std::abs(de_first / 10000.0 - 0.5) < 0.02);
}

TEST_CASE("ordered m=2 paths match enumeration") {
  const std::vector<double> p{0.9, 0.5, 0.3, 0.05};
  const auto g = make_graph({{"a", p[0]}, {"b", p[1]}, {"c", p[2]}, {"d", p[3]}});
  SamplerConfig cfg{1, FixedLength{2}, 0};
  Rng rng(77);
  std::map<std::string, int> counts;
  const int n = 40000;
  for (int i = 0; i < n; ++i) ++counts[path_signature(sample_paths(g, cfg, rng)[0])];
  const std::string codes = "abcd";
  double total = 0.0;
  for (std::size_t i = 0; i < 4; ++i) {
    for (std::size_t j = 0; j < 4; ++j) {
      if (i == j) continue;
      const double expected = path_probability(p, {i, j});
      total += expected;
      const std::string sig = std::string(1, codes[i]) + ">" + codes[j];
      const double sd = std::sqrt(n * expected * (1 - expected));
      CHECK_MESSAGE(std::abs(counts[sig] - n * expected) <= 4 * sd + 1, sig);
    }
  }
  CHECK(total == doctest::Approx(1.0));
}

TEST_CASE("joint probability attached to sampled paths") {
  const auto g = make_graph({{"de", 0.25}, {"hi", 1.0}});
  SamplerConfig cfg{4, FixedLength{2}, 0};
  Rng rng(5);
  for (const auto& path : sample_paths(g, cfg, rng)) CHECK(path.joint_probability == doctest::Approx(0.5));
}

TEST_CASE("sampled lengths") {
  const auto g = make_graph({{"a", 0.5}, {"b", 0.5}, {"c", 0.5}});
  SamplerConfig cfg{1, SampledLength{{0.0, 1.0, 0.0}}, 0};
  Rng rng(3);
  for (int i = 0; i < 100; ++i) CHECK(sample_paths(g, cfg, rng)[0].length() == 2);

  cfg.path_length = SampledLength{{1.0, 1.0, 2.0}};
  std::map<std::size_t, int> lens;
  for (int i = 0; i < 8000; ++i) ++lens[sample_paths(g, cfg, rng)[0].length()];
  CHECK(std::abs(lens[3] / 8000.0 - 0.5) < 0.03);
}

TEST_CASE("config validation") {
  const auto g = make_graph({{"de", 0.5}, {"hi", 0.5}});
  Rng rng(1);
  CHECK_THROWS_AS(sample_paths(g, {1, FixedLength{3}, 0}, rng), Error);
  CHECK_THROWS_AS(sample_paths(g, {0, FixedLength{1}, 0}, rng), Error);
  CHECK_THROWS_AS(sample_paths(g, {1, FixedLength{0}, 0}, rng), Error);
  CHECK_THROWS_AS(sample_paths(g, {1, SampledLength{{0.0, 0.0}}, 0}, rng), Error);
  CHECK_THROWS_AS(sample_paths(g, {1, SampledLength{{1.0, 1.0, 1.0}}, 0}, rng), Error);
}

TEST_CASE("paths never repeat a vertex") {
  const auto g = make_graph({{"a", 0.9}, {"b", 1e-4}, {"c", 0.3}, {"d", 0.6}, {"e", 0.01}});
  Rng rng(8);
  for (int i = 0; i < 2000; ++i) {
    for (const auto& path : sample_paths(g, {3, FixedLength{4}, 0}, rng)) {
      std::set<std::string> seen;
      for (const auto& v : path.vertices) seen.insert(v.code);
      CHECK(seen.size() == 4);
    }
  }
}

TEST_CASE("greedy path takes the most probable vertices") {
  const auto g = make_graph({{"a", 0.2}, {"b", 0.9}, {"c", 0.9}, {"d", 0.5}});
  const auto p = greedy_path(g, 3);
  CHECK(path_signature(p) == "b>c>d");
  CHECK(p.joint_probability == doctest::Approx(std::cbrt(0.9 * 0.9 * 0.5)));
}

}
