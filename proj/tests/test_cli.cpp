#include <doctest.h>

#include <sstream>

#include "detail.hpp"
#include "pomp/cli.hpp"
#include "pomp/graph.hpp"
#include "support.hpp"

using namespace pomp;

namespace {

struct Run {
  int code;
  std::string out;
  std::string err;
};

Run pomp_cli(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

const std::string kSample = test::fixture("sample.jsonl").string();

std::string init_graph(const test::TempDir& dir) {
  const auto path = (dir / "g0.json").string();
  REQUIRE(pomp_cli({"init-graph", "--dataset", kSample, "--out", path}).code == 0);
  return path;
}

std::vector<std::string> train_args(const std::string& ckpt, const std::string& out, const std::string& trace) {
  return {"train", "--checkpoint", ckpt, "--dataset", kSample, "--out", out, "--trace", trace,
          "--horizon", "12", "--paths", "2", "--path-length", "2", "--k-shot", "3", "--seed", "11"};
}

}  // namespace

TEST_SUITE("cli") {

TEST_CASE("init-graph with identical embeddings") {
  test::TempDir dir;
  const auto r = pomp_cli({"init-graph", "--dataset", kSample, "--embedder", "identical", "--out",
                           (dir / "g.json").string()});
  REQUIRE(r.code == 0);
  const auto g = load_checkpoint(dir / "g.json");
  CHECK(g.auxiliaries.size() == 3);
  for (double p : g.probabilities()) CHECK(p == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(r.out.find("German") != std::string::npos);
  CHECK(r.out.find("1.00000") != std::string::npos);
}

TEST_CASE("init-graph with fixed similarity") {
  test::TempDir dir;
  const auto r = pomp_cli({"init-graph", "--dataset", kSample, "--embedder", "fixed", "--similarity", "0.5",
                           "--out", (dir / "g.json").string()});
  REQUIRE(r.code == 0);
  for (double p : load_checkpoint(dir / "g.json").probabilities()) CHECK(p == doctest::Approx(0.60653).epsilon(1e-5));
  CHECK(r.out.find("0.60653") != std::string::npos);
}

TEST_CASE("init-graph rejects a record missing an auxiliary") {
  test::TempDir dir;
  auto text = detail::read_file(kSample);
  const auto pos = text.find(", \"hi\": \"billi");
  REQUIRE(pos != std::string::npos);
  text.erase(pos, text.find('"', text.find("billi")) - pos + 1);
  detail::write_file_atomic(dir / "broken.jsonl", text);
  const auto r = pomp_cli({"init-graph", "--dataset", (dir / "broken.jsonl").string(), "--out",
                           (dir / "g.json").string()});
  CHECK(r.code == cli::kDataError);
  CHECK(r.err.find("hi") != std::string::npos);
  CHECK_FALSE(std::filesystem::exists(dir / "g.json"));
}

TEST_CASE("exit codes") {
  test::TempDir dir;
  CHECK(pomp_cli({}).code == cli::kConfigError);
  CHECK(pomp_cli({"train", "--bogus"}).code == cli::kConfigError);
  CHECK(pomp_cli({"--help"}).code == cli::kOk);
  CHECK(pomp_cli({"init-graph", "--dataset", (dir / "nope.jsonl").string(), "--out", "x"}).code ==
        cli::kDataError);
  const auto g0 = init_graph(dir);
  CHECK(pomp_cli({"train", "--checkpoint", g0, "--dataset", kSample, "--out", (dir / "g.json").string(),
                  "--provider", "replay", "--replay-log", (dir / "none.jsonl").string()})
            .code == cli::kConfigError);
  CHECK(pomp_cli({"train", "--checkpoint", g0, "--dataset", kSample, "--out", (dir / "g.json").string(),
                  "--path-length", "7"})
            .code == cli::kConfigError);
}

TEST_CASE("train with horizon 0 copies the checkpoint") {
  test::TempDir dir;
  const auto g0 = init_graph(dir);
  const auto out = (dir / "g1.json").string();
  REQUIRE(pomp_cli({"train", "--checkpoint", g0, "--dataset", kSample, "--out", out, "--horizon", "0"}).code == 0);
  CHECK(detail::read_file(g0) == detail::read_file(out));
}

TEST_CASE("training is reproducible and replayable") {
  test::TempDir dir;
  const auto g0 = init_graph(dir);
  REQUIRE(pomp_cli(train_args(g0, (dir / "a.json").string(), (dir / "a.jsonl").string())).code == 0);
  REQUIRE(pomp_cli(train_args(g0, (dir / "b.json").string(), (dir / "b.jsonl").string())).code == 0);
  CHECK(detail::read_file(dir / "a.json") == detail::read_file(dir / "b.json"));
  CHECK(detail::read_file(dir / "a.jsonl") == detail::read_file(dir / "b.jsonl"));

  auto rec = train_args(g0, (dir / "c.json").string(), (dir / "c.jsonl").string());
  rec.insert(rec.end(), {"--record-log", (dir / "replay.jsonl").string()});
  REQUIRE(pomp_cli(rec).code == 0);
  auto rep = train_args(g0, (dir / "d.json").string(), (dir / "d.jsonl").string());
  rep.insert(rep.end(), {"--provider", "replay", "--replay-log", (dir / "replay.jsonl").string()});
  const auto r = pomp_cli(rep);
  REQUIRE_MESSAGE(r.code == 0, r.err);
  CHECK(detail::read_file(dir / "c.json") == detail::read_file(dir / "a.json"));
  CHECK(detail::read_file(dir / "d.json") == detail::read_file(dir / "a.json"));
  CHECK(detail::read_file(dir / "d.jsonl") == detail::read_file(dir / "a.jsonl"));
}

TEST_CASE("config file supplies defaults") {
  test::TempDir dir;
  const auto g0 = init_graph(dir);
  detail::write_file_atomic(dir / "run.toml", "[train]\nhorizon = 3\npaths = 1\nseed = 5\n");
  const auto r = pomp_cli({"--config", (dir / "run.toml").string(), "train", "--checkpoint", g0, "--dataset", kSample,
                           "--out", (dir / "g.json").string()});
  REQUIRE_MESSAGE(r.code == 0, r.err);
  CHECK(r.out.find("0..3") != std::string::npos);
  CHECK(load_checkpoint(dir / "g.json").revision == 3);
}

TEST_CASE("infer and baseline") {
  test::TempDir dir;
  const auto g0 = init_graph(dir);
  auto r = pomp_cli({"infer", "--checkpoint", g0, "--dataset", kSample, "--out", (dir / "inf.jsonl").string()});
  REQUIRE_MESSAGE(r.code == 0, r.err);
  CHECK(r.out.find("s1 [") != std::string::npos);
  CHECK(detail::read_file(g0) == detail::read_file(g0));
  CHECK(std::filesystem::file_size(dir / "inf.jsonl") > 0);

  r = pomp_cli({"baseline", "--kind", "trans", "--dataset", kSample, "--out", (dir / "base.json").string()});
  REQUIRE_MESSAGE(r.code == 0, r.err);
  CHECK(r.out.find("baseline trans mean chrF") != std::string::npos);
}

TEST_CASE("simulate reports concentration") {
  test::TempDir dir;
  detail::write_file_atomic(
      dir / "oracle.json",
      R"({"utilities":{"de":0.4,"es":0.05,"fi":0.05,"hi":0.05,"ru":0.05,"zh":0.05},"base_score":0.3,"noise_std":0.05})");
  const auto r = pomp_cli({"simulate", "--oracle", (dir / "oracle.json").string(), "--runs", "10", "--paths", "2",
                           "--path-length", "2", "--horizon", "500", "--trace", (dir / "sim.jsonl").string()});
  REQUIRE_MESSAGE(r.code == 0, r.err);
  CHECK(r.out.find("'de' strictly highest in 10/10") != std::string::npos);

  const auto rep = pomp_cli({"report", "--trace", (dir / "sim.jsonl").string()});
  CHECK(rep.code == 0);
  CHECK(rep.out.find("instances: 500") != std::string::npos);
}

TEST_CASE("report on an empty trace warns and succeeds") {
  test::TempDir dir;
  detail::write_file_atomic(dir / "empty.jsonl", "");
  const auto r = pomp_cli({"report", "--trace", (dir / "empty.jsonl").string()});
  CHECK(r.code == 0);
  CHECK(r.out.find("warning") != std::string::npos);
}

}
