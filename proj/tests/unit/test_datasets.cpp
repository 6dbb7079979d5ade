// Copyright 2026 The Tempo Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <doctest.h>

#include <algorithm>
#include <set>

#include "core/datasets.hpp"
#include "core/error.hpp"

using namespace tempo;
using namespace tempo::datasets;
using events::Event;

namespace {

const char* kTinySchema = R"(
# comment
schema errand
slot who = Ann | Bo
slot shop = the bakery | the market
step ARG0={who} ; V=walked ; ARGM-DIR=to {shop}
step ARG0={who} ; V=entered ; ARG1={shop}
step ARG0={who} ; V=bought ; ARG1=bread at {shop}
step ARG0={who} ; V=went ; ARGM-DIR=home from {shop}
end
)";

Event node(int i) { return Event::from_roles({{"V", "e" + std::to_string(i)}}); }

}  // namespace

TEST_CASE("timex corpora are in chronological order for every kind") {
  for (auto kind : {TimexKind::kYear, TimexKind::kMonth, TimexKind::kWeekday,
                    TimexKind::kClock24, TimexKind::kClock12}) {
    TimexSpec spec;
    spec.kind = kind;
    const auto corpus = gen_timex_corpus(spec, 50, 3, 7);
    REQUIRE(corpus.size() == 50);
    for (const auto& seq : corpus) {
      REQUIRE(seq.events.size() == 3);
      std::vector<int> keys;
      for (const auto& e : seq.events) {
        const auto k = timex_key(kind, e);
        REQUIRE(k.has_value());
        keys.push_back(*k);
      }
      CHECK(std::is_sorted(keys.begin(), keys.end()));
      CHECK(std::adjacent_find(keys.begin(), keys.end()) == keys.end());
    }
  }
}

TEST_CASE("timex prepositions follow English usage") {
  CHECK(make_timex(TimexKind::kYear, 1999).text == "in 1999");
  CHECK(make_timex(TimexKind::kMonth, 5).text.rfind("in ", 0) == 0);
  CHECK(make_timex(TimexKind::kWeekday, 2).text.rfind("on ", 0) == 0);
  CHECK(make_timex(TimexKind::kClock24, 14 * 60 + 5).text == "at 14:05");
  CHECK(make_timex(TimexKind::kClock12, 14 * 60 + 30).text == "at 2:30 pm");
  CHECK(make_timex(TimexKind::kClock12, 30).text == "at 12:30 am");
}

TEST_CASE("excluded years never appear and bounds hold") {
  TimexSpec spec;
  spec.excluded_years = std::make_pair(1850, 1949);
  spec.window_prob = 0.5;
  for (const auto& seq : gen_timex_corpus(spec, 300, 3, 3)) {
    for (const auto& e : seq.events) {
      const int y = *timex_key(TimexKind::kYear, e);
      CHECK((y < 1850 || y > 1949));
      CHECK(y >= 1000);
      CHECK(y <= 2100);
    }
  }
  spec.year_min = 900;
  CHECK_THROWS_AS(spec.validate(), Error);
}

TEST_CASE("schema files parse and instantiate consistently") {
  const auto schemas = parse_schemas(kTinySchema);
  REQUIRE(schemas.size() == 1);
  CHECK(schemas[0].name == "errand");
  CHECK(schemas[0].steps.size() == 4);
  Rng rng(2);
  const auto seq = instantiate_schema(schemas[0], rng);
  REQUIRE(seq.events.size() == 4);
  const auto who = seq.events[0].constituents()[0].text;
  for (const auto& e : seq.events) CHECK(e.constituents()[0].text == who);
  CHECK(seq.events[2].predicate() == "bought");
}

TEST_CASE("malformed schemas are rejected") {
  CHECK_THROWS_AS(parse_schemas("schema x\nstep V=a\nstep V=b\nend\n"), Error);
  CHECK_THROWS_AS(parse_schemas("schema x\nslot a = p\nstep ARG0={a} ; V=x\n"
                                "step ARG0={a} ; V=y\nstep ARG0={zz} ; V=z\nend\n"),
                  Error);
  CHECK_THROWS_AS(parse_schemas("schema x\nslot a = p\nslot b = q\nstep ARG0={a} ; V=x\n"
                                "step ARG0={b} ; V=y\nstep ARG0={b} ; V=z\nend\n"),
                  Error);
}

TEST_CASE("step dropping keeps at least three steps and never drops neighbours") {
  const auto schemas = parse_schemas(kTinySchema);
  const auto corpus = gen_schema_corpus(schemas, 300, 5, {0.5});
  bool saw_drop = false;
  for (const auto& seq : corpus) {
    CHECK(seq.events.size() >= 3);
    saw_drop |= seq.events.size() < 4;
    std::vector<std::string> preds;
    for (const auto& e : seq.events) preds.push_back(e.predicate());
    const std::vector<std::string> all{"walked", "entered", "bought", "went"};
    CHECK(std::includes(all.begin(), all.end(), preds.begin(), preds.end(),
                        [&](const std::string& a, const std::string& b) {
                          return std::find(all.begin(), all.end(), a) <
                                 std::find(all.begin(), all.end(), b);
                        }));
  }
  CHECK(saw_drop);
}

TEST_CASE("shipped schema library loads") {
  const auto schemas = load_schemas(TEMPO_DATA_DIR "/schemas.txt");
  CHECK(schemas.size() >= 10);
}

TEST_CASE("diamond graph yields both source-to-sink paths") {
  std::vector<Event> evs{node(0), node(1), node(2), node(3)};
  const std::vector<Relation> rels{{0, 1, "BEFORE"}, {0, 2, "BEFORE"}, {1, 3, "BEFORE"},
                                   {2, 3, "BEFORE"}};
  const auto paths = dag_paths(4, rels);
  CHECK(paths == std::vector<std::vector<int>>{{0, 1, 3}, {0, 2, 3}});
  const auto seqs = dag_to_sequences(evs, rels, "story");
  REQUIRE(seqs.size() == 2);
  CHECK(seqs[1].events[1].predicate() == "e2");
}

TEST_CASE("non-ordering relations are ignored") {
  CHECK(is_excluded_relation("IDENTITY"));
  CHECK(is_excluded_relation("CAUSE_TO_END"));
  CHECK_FALSE(is_excluded_relation("BEFORE"));
  CHECK(dag_paths(3, {{0, 1, "BEFORE"}, {1, 2, "IDENTITY"}}) ==
        std::vector<std::vector<int>>{{0, 1}});
}

TEST_CASE("cycles raise the cycle error with the offending path") {
  try {
    dag_paths(3, {{0, 1, "BEFORE"}, {1, 2, "BEFORE"}, {2, 0, "BEFORE"}});
    FAIL("expected a cycle error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kCycle);
    CHECK(std::string(e.what()).find("0 -> 1 -> 2 -> 0") != std::string::npos);
  }
}

TEST_CASE("ROUGE-L is the LCS F-measure") {
  const auto a = rouge_tokens("The cat sat on the mat.");
  const auto b = rouge_tokens("the cat lay on a mat");
  // LCS "the cat on mat" = 4; P = 4/6, R = 4/6.
  CHECK(rouge_l(a, b) == doctest::Approx(4.0 / 6.0));
  CHECK(rouge_l(a, a) == doctest::Approx(1.0));
  CHECK(rouge_l({}, b) == 0.0);
  CHECK(rouge_tokens("Hello, World!") == std::vector<std::string>{"hello", "world"});
}

TEST_CASE("question templates extract relation and event text") {
  const auto templates = parse_templates(
      "# relation<TAB>regex\n"
      "after\twhat did .+ do after (.+)\n"
      "before\twhat happened before (.+)\n");
  REQUIRE(templates.size() == 2);
  auto q = parse_mctaco_question("What did Tom do after he ate dinner?", templates);
  REQUIRE(q.has_value());
  CHECK(q->relation == TemporalRelation::kAfter);
  CHECK(q->event_text == "he ate dinner");
  q = parse_mctaco_question("  What happened before the storm. ", templates);
  REQUIRE(q.has_value());
  CHECK(q->relation == TemporalRelation::kBefore);
  CHECK(q->template_index == 1);
  CHECK_FALSE(parse_mctaco_question("How long did it take?", templates).has_value());
  CHECK_THROWS_AS(parse_templates("sideways\t(.+)\n"), Error);
  CHECK_THROWS_AS(parse_templates("after\tno capture\n"), Error);
}

TEST_CASE("question events match the closest context event") {
  const std::vector<Event> ctx{
      Event::from_roles({{"ARG0", "he"}, {"V", "ate"}, {"ARG1", "dinner"}}),
      Event::from_roles({{"ARG0", "he"}, {"V", "washed"}, {"ARG1", "the dishes"}})};
  auto m = match_question_event("he washed dishes", ctx);
  CHECK(m.index == 1);
  CHECK_FALSE(m.low_confidence);
  m = match_question_event("zebras", ctx);
  CHECK(m.low_confidence);
}

TEST_CASE("shipped question fixture and templates load") {
  const auto examples = load_mctaco(TEMPO_DATA_DIR "/mctaco_fixture.jsonl");
  const auto templates = load_templates(TEMPO_DATA_DIR "/mctaco_templates.txt");
  CHECK(examples.size() >= 20);
  CHECK_FALSE(templates.empty());
}
