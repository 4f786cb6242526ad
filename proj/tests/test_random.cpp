#include <doctest.h>

#include <cmath>
#include <set>

#include "pomp/random.hpp"

using namespace pomp;

TEST_SUITE("random") {

TEST_CASE("mt19937_64 matches the standard's 10000th output") {
  Rng rng(5489u);
  rng.discard(9999);
  CHECK(rng() == 9981545732273789042ULL);
}

TEST_CASE("derived seeds are stable and label-sensitive") {
  CHECK(derive_seed(1, "sample", 0) == derive_seed(1, "sample", 0));
  std::set<std::uint64_t> seen;
  for (const char* label : {"sample", "shots/generate", "shots/aggregate", "oracle", "infer"}) {
    for (std::uint64_t i = 0; i < 50; ++i) seen.insert(derive_seed(7, label, i));
  }
  CHECK(seen.size() == 250);
  CHECK(derive_seed(1, "sample") != derive_seed(2, "sample"));
}

TEST_CASE("uniform01 stays in [0, 1) with the expected mean") {
  Rng rng(42);
  double sum = 0.0;
  const int n = 100000;
  for (int i = 0; i < n; ++i) {
    const double u = uniform01(rng);
    REQUIRE(u >= 0.0);
    REQUIRE(u < 1.0);
    sum += u;
  }
  // sd of the mean is sqrt(1/12 / n) ~ 0.00091
  CHECK(std::abs(sum / n - 0.5) < 0.005);
}

TEST_CASE("uniform_index covers its range evenly") {
  Rng rng(3);
  std::vector<int> counts(7, 0);
  const int n = 70000;
  for (int i = 0; i < n; ++i) ++counts[uniform_index(rng, 7)];
  for (int c : counts) CHECK(std::abs(c - 10000) < 400);  // ~4.3 sd
  CHECK(uniform_index(rng, 1) == 0);
}

TEST_CASE("standard_normal has unit variance") {
  Rng rng(11);
  double s = 0.0, s2 = 0.0;
  const int n = 100000;
  for (int i = 0; i < n; ++i) {
    const double z = standard_normal(rng);
    s += z;
    s2 += z * z;
  }
  CHECK(std::abs(s / n) < 0.02);
  CHECK(std::abs(s2 / n - 1.0) < 0.03);
}

}
