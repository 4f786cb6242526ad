#include <doctest.h>

#include "detail.hpp"
#include "pomp/corpus.hpp"
#include "pomp/error.hpp"
#include "pomp/prompt.hpp"
#include "support.hpp"

using namespace pomp;

namespace {

struct TableFixture {
  Dataset ds = load_dataset(test::fixture("golden/table_examples.jsonl"));
  PromptLanguages langs{ds.source, ds.target};
  std::vector<ExampleRecord> shots{ds.records.begin(), ds.records.end() - 1};
  ExampleRecord query = ds.records.back();
  LanguageId es = ds.aux_lang("es");
  LanguageId zh = ds.aux_lang("zh");
};

std::string golden(const std::string& name) { return detail::read_file(test::fixture("golden/" + name)); }

const std::string kRefined = "They all ran back from the place where the accident happened.";

}  // namespace

TEST_SUITE("prompt") {

TEST_CASE("generate prompts match the goldens") {
  TableFixture f;
  CHECK(build_generate_prompt(f.langs, f.es, f.shots, f.query, f.query.initial_translation) ==
        golden("generate_es.txt"));
  CHECK(build_generate_prompt(f.langs, f.zh, f.shots, f.query, f.query.initial_translation) ==
        golden("generate_zh.txt"));
}

TEST_CASE("aggregate prompt matches the golden") {
  TableFixture f;
  const std::vector<LanguageId> path{f.es, f.zh};
  CHECK(build_aggregate_prompt(f.langs, path, f.shots, f.query, kRefined) == golden("aggregate_es_zh.txt"));
}

TEST_CASE("baseline prompts match the goldens") {
  TableFixture f;
  CHECK(build_trans_prompt(f.langs, f.shots, f.query) == golden("trans.txt"));
  CHECK(build_refine_prompt(f.langs, f.shots, f.query) == golden("refine.txt"));
}

TEST_CASE("zero-shot prompts hold only the query") {
  TableFixture f;
  const std::vector<ExampleRecord> none;
  CHECK(build_generate_prompt(f.langs, f.es, none, f.query, "draft") ==
        "<Sinhala source>: " + f.query.source_sentence + "\n<Spanish translation>: " +
            f.query.aux_translations.at("es") + "\n<English translation>: draft\n<Refined translation>:");
  CHECK(build_trans_prompt(f.langs, none, f.query) ==
        "<Sinhala source>: " + f.query.source_sentence + "\n<English translation>:");
}

TEST_CASE("length-1 aggregate equals generate with the refined text") {
  TableFixture f;
  const std::vector<LanguageId> path{f.zh};
  CHECK(build_aggregate_prompt(f.langs, path, f.shots, f.query, kRefined) ==
        build_generate_prompt(f.langs, f.zh, f.shots, f.query, kRefined));
}

TEST_CASE("missing fields name the offending example") {
  TableFixture f;
  f.shots[2].aux_translations.erase("es");
  try {
    build_generate_prompt(f.langs, f.es, f.shots, f.query, "x");
    FAIL("expected missing field");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::missing_field);
    CHECK(std::string(e.what()).find("shot3") != std::string::npos);
    CHECK(std::string(e.what()).find("Spanish") != std::string::npos);
  }
  // The Chinese prompt does not need the Spanish text.
  CHECK_NOTHROW(build_generate_prompt(f.langs, f.zh, f.shots, f.query, "x"));

  TableFixture g;
  g.shots[0].gold_reference.reset();
  CHECK_THROWS_AS(build_refine_prompt(g.langs, g.shots, g.query), Error);
  CHECK_NOTHROW(build_trans_prompt(g.langs, g.shots, g.query));
}

TEST_CASE("empty refined translation is rejected") {
  TableFixture f;
  const std::vector<LanguageId> path{f.es, f.zh};
  try {
    build_aggregate_prompt(f.langs, path, f.shots, f.query, "");
    FAIL("expected validation error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::invalid_input);
  }
}

TEST_CASE("preamble and request dispatch") {
  TableFixture f;
  PromptOptions opts{"Refine the translation."};
  const auto p = build_refine_prompt(f.langs, f.shots, f.query, opts);
  CHECK(p == "Refine the translation.\n\n" + golden("refine.txt"));

  PromptRequest req{PromptKind::aggregate, f.shots, f.query, {f.es, f.zh}, kRefined};
  CHECK(render(f.langs, req) == golden("aggregate_es_zh.txt"));
  req.kind = PromptKind::generate;
  CHECK_THROWS_AS(render(f.langs, req), Error);
  CHECK(std::string(to_string(PromptKind::trans)) == "trans");
}

}
