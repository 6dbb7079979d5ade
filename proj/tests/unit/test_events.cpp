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

#include <filesystem>

#include "core/error.hpp"
#include "core/events.hpp"

using namespace tempo;
using namespace tempo::events;

namespace {

Event ev(const std::string& a0, const std::string& v, const std::string& a1) {
  return Event::from_roles({{"ARG0", a0}, {"V", v}, {"ARG1", a1}});
}

}  // namespace

TEST_CASE("events need exactly one predicate and non-empty text") {
  CHECK_THROWS_AS(Event::from_roles({{"ARG0", "he"}, {"ARG1", "it"}}), Error);
  CHECK_THROWS_AS(Event::from_roles({{"V", "ran"}, {"V", "walked"}}), Error);
  CHECK_THROWS_AS(Event::from_roles({{"ARG0", "  "}, {"V", "ran"}}), Error);
  const auto e = Event::from_roles({{"ARG0", " the  dog "}, {"V", "barked"}});
  CHECK(e.predicate() == "barked");
  CHECK(render_event(e) == "the dog barked");
}

TEST_CASE("input rendering prepends one tag per event") {
  const std::vector<Event> es{ev("i", "ate", "lunch"), ev("i", "slept", "well")};
  CHECK(render_input(es, {TagVariant::kPlain, 16}).text == "[E] i ate lunch [E] i slept well");
  CHECK(render_input(es, {TagVariant::kIndexed, 16}).text ==
        "[E1] i ate lunch [E2] i slept well");
  CHECK(render_input({}, {TagVariant::kIndexed, 16}).degenerate);
}

TEST_CASE("indexed rendering refuses more events than tags") {
  std::vector<Event> es(3, ev("a", "b", "c"));
  CHECK_THROWS_AS(render_input(es, {TagVariant::kIndexed, 2}), Error);
  CHECK_NOTHROW(render_input(es, {TagVariant::kPlain, 2}));
}

TEST_CASE("target rendering carries the predicate and the source index") {
  const std::vector<Event> es{ev("i", "slept", "well"), ev("i", "ate", "lunch")};
  const TagScheme indexed{TagVariant::kIndexed, 16};
  CHECK(render_target(es, indexed, {1, std::nullopt}) ==
        "[E2] slept [A] i slept well [E] ate [A] i ate lunch");
  CHECK(render_target(es, {TagVariant::kPlain, 16}) ==
        "[E] slept [A] i slept well [E] ate [A] i ate lunch");
}

TEST_CASE("generated text parses back into segments") {
  const TagScheme indexed{TagVariant::kIndexed, 16};
  const auto segs = parse_generated("[E2] slept [A] i slept well [E] ate [A] i ate lunch", indexed);
  REQUIRE(segs.size() == 2);
  CHECK(segs[0].tag == 2);
  CHECK(segs[0].predicate == "slept");
  CHECK(segs[0].body == "i slept well");
  CHECK_FALSE(segs[1].tag.has_value());
  CHECK_FALSE(segs[1].malformed);

  const auto broken = parse_generated("junk [E1] no arg marker", indexed);
  REQUIRE(broken.size() == 2);
  CHECK(broken[0].malformed);
  CHECK(broken[1].malformed);

  const auto plain = parse_generated("[E3] x [A] y", {TagVariant::kPlain, 16});
  REQUIRE(plain.size() == 1);
  CHECK_FALSE(plain[0].tag.has_value());
}

TEST_CASE("event tag recognition") {
  std::optional<int> n;
  CHECK(is_event_tag("[E]", &n));
  CHECK_FALSE(n.has_value());
  CHECK(is_event_tag("[E12]", &n));
  CHECK(n == 12);
  CHECK_FALSE(is_event_tag("[A]"));
  CHECK_FALSE(is_event_tag("[Ex]"));
}

TEST_CASE("chains link later sentences through shared content words") {
  SrlDocument doc;
  doc.id = "d";
  doc.sentences = {
      {ev("John", "bought", "a car")},
      {ev("the weather", "was", "nice")},
      {ev("John", "drove", "the car")},
      {ev("Mary", "painted", "the car")},
  };
  const std::set<std::string> stop{"the", "a", "was"};
  const auto chains = extract_chains(doc, stop);
  REQUIRE(chains.size() == 1);
  REQUIRE(chains[0].events.size() == 3);
  CHECK(chains[0].events[0].predicate() == "bought");
  CHECK(chains[0].events[1].predicate() == "drove");
  CHECK(chains[0].events[2].predicate() == "painted");
  CHECK(chains[0].source_id == "d:0");
}

TEST_CASE("events in the same sentence never chain to each other") {
  SrlDocument doc;
  doc.id = "s";
  doc.sentences = {{ev("Ann", "met", "Bob"), ev("Ann", "left", "early")}};
  CHECK(extract_chains(doc, {}).empty());
}

TEST_CASE("sequence JSON round-trips") {
  EventSequence s{{ev("i", "ate", "lunch"),
                   Event::from_roles({{"V", "rained"}, {"ARGM-TMP", "in 1999"}})},
                  "x:1"};
  const auto back = sequence_from_json(nlohmann::json::parse(sequence_to_json(s).dump()));
  CHECK(back.source_id == "x:1");
  REQUIRE(back.events.size() == 2);
  CHECK(back.events[0] == s.events[0]);
  CHECK(back.events[1] == s.events[1]);
}

TEST_CASE("missing files report the missing-file code") {
  try {
    load_stopwords("/nonexistent/stopwords.txt");
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kMissingFile);
  }
}

TEST_CASE("JSONL write and read") {
  const auto path = (std::filesystem::temp_directory_path() / "tempo_events_test.jsonl").string();
  write_jsonl(path, {nlohmann::ordered_json{{"a", 1}}, nlohmann::ordered_json{{"b", 2}}});
  const auto rows = read_jsonl(path);
  REQUIRE(rows.size() == 2);
  CHECK(rows[1]["b"] == 2);
  std::filesystem::remove(path);
}
