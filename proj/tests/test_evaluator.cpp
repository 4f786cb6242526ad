#include <doctest.h>

#include <algorithm>
#include <atomic>
#include <json.hpp>

#include "http_stub.hpp"
#include "pomp/error.hpp"
#include "pomp/evaluator.hpp"
#include "pomp/random.hpp"

using namespace pomp;
using namespace std::chrono_literals;

namespace {

// Brute-force chrF over ASCII strings: enumerate every n-gram pair and
// greedily pair off equal ones.
double brute_chrf(const std::string& hyp, const std::string& ref, int max_order = 6, double beta = 2.0) {
  if (hyp.empty() && ref.empty()) return 1.0;
  if (hyp.empty() || ref.empty()) return 0.0;
  double p = 0.0, r = 0.0;
  int orders = 0;
  for (int n = 1; n <= max_order; ++n) {
    const int hn = static_cast<int>(hyp.size()) - n + 1;
    const int rn = static_cast<int>(ref.size()) - n + 1;
    if (hn < 1 || rn < 1) break;
    std::vector<bool> used(rn, false);
    int matches = 0;
    for (int i = 0; i < hn; ++i) {
      for (int j = 0; j < rn; ++j) {
        if (!used[j] && hyp.compare(i, n, ref, j, n) == 0) {
          used[j] = true;
          ++matches;
          break;
        }
      }
    }
    p += static_cast<double>(matches) / hn;
    r += static_cast<double>(matches) / rn;
    ++orders;
  }
  p /= orders;
  r /= orders;
  if (p + r == 0.0) return 0.0;
  return (1 + beta * beta) * p * r / (beta * beta * p + r);
}

struct Failing final : Scorer {
  std::string bad;
  explicit Failing(std::string b) : bad(std::move(b)) {}
  Score score(std::string_view c, std::string_view r) override {
    if (c == bad) throw Error(ErrorKind::transport, "scorer down");
    return {MockScorer::hash_score(c, r), "failing"};
  }
  std::string name() const override { return "failing"; }
};

}  // namespace

TEST_SUITE("evaluator") {

TEST_CASE("chrF fixed points") {
  CHECK(chrf("the cat", "the cat") == 1.0);
  CHECK(chrf("abc", "xyz") == 0.0);
  CHECK(chrf("", "") == 1.0);
  CHECK(chrf("", "abc") == 0.0);
  CHECK(chrf("abc", "") == 0.0);
}

TEST_CASE("chrF on abcdef vs abcxef") {
  // Orders 1..6 match 5/6, 3/5, 1/4, 0, 0, 0 on both sides.
  const double hand = (5.0 / 6 + 3.0 / 5 + 1.0 / 4) / 6;
  CHECK(brute_chrf("abcdef", "abcxef") == doctest::Approx(hand).epsilon(1e-15));
  CHECK(chrf("abcdef", "abcxef") == doctest::Approx(hand).epsilon(1e-15));
}

TEST_CASE("chrF matches the brute-force counter on random strings") {
  Rng rng(12);
  const std::string alphabet = "ab c";
  for (int trial = 0; trial < 500; ++trial) {
    std::string h, r;
    const auto hl = uniform_index(rng, 12), rl = uniform_index(rng, 12);
    for (std::uint64_t i = 0; i < hl; ++i) h += alphabet[uniform_index(rng, alphabet.size())];
    for (std::uint64_t i = 0; i < rl; ++i) r += alphabet[uniform_index(rng, alphabet.size())];
    CHECK_MESSAGE(chrf(h, r) == doctest::Approx(brute_chrf(h, r)).epsilon(1e-12), h << " | " << r);
  }
}

TEST_CASE("chrF counts code points, not bytes") {
  // Each accented letter is one unit, so this is the same as "axc" vs "abc".
  CHECK(chrf("a\xc3\xb1" "c", "abc") == doctest::Approx(brute_chrf("axc", "abc")).epsilon(1e-15));
}

TEST_CASE("mock scorer") {
  MockScorer m;
  CHECK(m.score("same", "same").value == 1.0);
  const double v = m.score("one", "two").value;
  CHECK(v >= 0.0);
  CHECK(v < 1.0);
  CHECK(m.score("one", "two").value == v);
  m.set("scripted", 0.25);
  CHECK(m.score("scripted", "whatever").value == 0.25);
  MockScorer bad([](std::string_view, std::string_view) { return 1.5; });
  CHECK_THROWS_AS(bad.score("a", "b"), Error);
}

TEST_CASE("select_best picks the argmax") {
  MockScorer m;
  m.set("init", 0.5);
  m.set("c1", 0.4);
  m.set("c2", 0.7);
  const std::vector<std::pair<std::string, std::string>> cands{{"de", "c1"}, {"hi", "c2"}};
  const auto sel = select_best(cands, "init", "ref", m);
  CHECK(sel.text == "c2");
  CHECK(sel.label == "hi");
  REQUIRE(sel.candidates.size() == 2);
  CHECK(*sel.candidates[0].score == 0.4);
  CHECK(*sel.candidates[1].score == 0.7);
  CHECK(*sel.initial_score == 0.5);
  CHECK(*sel.score == 0.7);
}

TEST_CASE("select_best edge cases") {
  MockScorer m;
  m.set("init", 0.6);
  m.set("tie", 0.6);
  m.set("a", 0.8);
  m.set("b", 0.8);
  const auto empty = select_best({}, "init", "ref", m);
  CHECK(empty.initial_chosen());
  CHECK(empty.text == "init");

  const std::vector<std::pair<std::string, std::string>> tie{{"x", "tie"}};
  CHECK(select_best(tie, "init", "ref", m).initial_chosen());

  const std::vector<std::pair<std::string, std::string>> two{{"first", "a"}, {"second", "b"}};
  CHECK(select_best(two, "init", "ref", m).label == "first");
}

TEST_CASE("failed candidates are excluded with a warning") {
  Failing f("broken");
  const std::vector<std::pair<std::string, std::string>> cands{{"de", "broken"}, {"hi", "ref"}};
  const auto sel = select_best(cands, "init", "ref", f);
  CHECK(sel.label == "hi");
  CHECK_FALSE(sel.candidates[0].score.has_value());
  CHECK(sel.warnings.size() == 1);
}

TEST_CASE("remote scorer batches, clamps and retries") {
  test::HttpStub stub;
  std::atomic<int> calls{0};
  std::vector<std::size_t> sizes;
  stub.server().Post("/score", [&](const httplib::Request& req, httplib::Response& res) {
    if (++calls == 1) {
      res.status = 503;
      return;
    }
    const auto j = nlohmann::json::parse(req.body);
    sizes.push_back(j["pairs"].size());
    nlohmann::json scores = nlohmann::json::array();
    for (const auto& p : j["pairs"]) scores.push_back(p["candidate"] == p["reference"] ? 1.2 : 0.3);
    res.set_content(nlohmann::json{{"scores", scores}}.dump(), "application/json");
  });
  stub.start();

  RemoteScorerConfig cfg;
  cfg.url = stub.url("/score");
  cfg.batch_size = 2;
  cfg.timeout = 5000ms;
  RemoteScorer scorer(cfg, [](auto) {});
  const std::vector<ScorePair> pairs{{"a", "a"}, {"a", "b"}, {"c", "c"}, {"d", "e"}, {"f", "f"}};
  const auto scores = scorer.score_batch(pairs);
  REQUIRE(scores.size() == 5);
  CHECK(scores[0].value == 1.0);
  CHECK(scores[1].value == 0.3);
  CHECK(scores[4].value == 1.0);
  CHECK(sizes == std::vector<std::size_t>{2, 2, 1});
  CHECK(scorer.score("x", "y").value == 0.3);
}

TEST_CASE("remote scorer rejects a wrong-length reply") {
  test::HttpStub stub;
  stub.server().Post("/score", [](const auto&, httplib::Response& res) {
    res.set_content("{\"scores\":[0.1,0.2]}", "application/json");
  });
  stub.start();
  RemoteScorerConfig cfg;
  cfg.url = stub.url("/score");
  RemoteScorer scorer(cfg, [](auto) {});
  try {
    scorer.score("x", "y");
    FAIL("expected malformed response");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::malformed_response);
  }
}

}
