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
#include <numeric>
#include <set>

#include "core/corruption.hpp"
#include "core/error.hpp"

using namespace tempo;
using namespace tempo::corruption;
using events::Event;
using events::EventSequence;

namespace {

EventSequence numbered(int n, const std::string& id = "s") {
  EventSequence s;
  s.source_id = id;
  for (int i = 0; i < n; ++i) {
    s.events.push_back(Event::from_roles({{"ARG0", "actor"}, {"V", "did" + std::to_string(i)}}));
  }
  return s;
}

int index_of(const EventSequence& s, const Event& e) {
  for (std::size_t i = 0; i < s.events.size(); ++i) {
    if (s.events[i] == e) return static_cast<int>(i);
  }
  return -1;
}

}  // namespace

TEST_CASE("without deletion the input is a permutation of the target") {
  const auto seq = numbered(5);
  Rng rng(3);
  CorruptionConfig cfg;
  cfg.deletion_prob = 0.0;
  for (int trial = 0; trial < 50; ++trial) {
    const auto ex = corrupt(seq, cfg, rng);
    REQUIRE(ex.input_events.size() == 5);
    std::vector<int> seen;
    for (const auto& e : ex.input_events) seen.push_back(index_of(seq, e));
    std::sort(seen.begin(), seen.end());
    CHECK(seen == std::vector<int>{0, 1, 2, 3, 4});
    CHECK(ex.target.events.size() == 5);
  }
}

TEST_CASE("alignment points each input event at its target slot") {
  const auto seq = numbered(6);
  Rng rng(9);
  CorruptionConfig cfg;
  cfg.deletion_prob = 0.4;
  for (int trial = 0; trial < 200; ++trial) {
    const auto ex = corrupt(seq, cfg, rng);
    CHECK_FALSE(ex.input_events.empty());
    CHECK(ex.alignment.size() == ex.input_events.size());
    for (const auto& [in, tgt] : ex.alignment) {
      CHECK(ex.input_events[in] == ex.target.events[tgt]);
    }
    const auto map = ex.target_to_input();
    int mapped = 0;
    for (const auto& m : map) mapped += m.has_value();
    CHECK(mapped == static_cast<int>(ex.input_events.size()));
  }
}

TEST_CASE("deletion rate tracks the configured probability") {
  const auto seq = numbered(8);
  Rng rng(17);
  CorruptionConfig cfg;
  cfg.deletion_prob = 0.15;
  int deleted = 0, total = 0;
  for (int trial = 0; trial < 4000; ++trial) {
    const auto ex = corrupt(seq, cfg, rng);
    deleted += 8 - static_cast<int>(ex.input_events.size());
    total += 8;
  }
  CHECK(static_cast<double>(deleted) / total == doctest::Approx(0.15).epsilon(0.1));
}

TEST_CASE("deleting everything still keeps one event") {
  const auto seq = numbered(4);
  Rng rng(1);
  const auto ex = corrupt_with_order(seq, {0, 1, 2, 3}, 1.0, rng);
  CHECK(ex.input_events.size() == 1);
}

TEST_CASE("training set draws distinct permutations per sequence") {
  std::vector<EventSequence> corpus{numbered(3, "a"), numbered(4, "b")};
  CorruptionConfig cfg;
  cfg.deletion_prob = 0.0;
  cfg.permutations_per_sequence = 2;
  const auto set = make_training_set(corpus, cfg);
  REQUIRE(set.size() == 4);
  for (int s = 0; s < 2; ++s) {
    std::vector<std::vector<int>> orders;
    for (int k = 0; k < 2; ++k) {
      const auto& ex = set[static_cast<std::size_t>(2 * s + k)];
      std::vector<int> o;
      for (const auto& [in, tgt] : ex.alignment) o.push_back(tgt);
      orders.push_back(o);
    }
    CHECK(orders[0] != orders[1]);
  }
  // Two-event sequences have exactly two orders; asking for three repeats.
  cfg.permutations_per_sequence = 3;
  CHECK(make_training_set({numbered(2)}, cfg).size() == 3);
}

TEST_CASE("training sets are reproducible from the seed") {
  std::vector<EventSequence> corpus{numbered(5, "a"), numbered(5, "b")};
  CorruptionConfig cfg;
  const auto a = make_training_set(corpus, cfg);
  const auto b = make_training_set(corpus, cfg);
  REQUIRE(a.size() == b.size());
  for (std::size_t i = 0; i < a.size(); ++i) CHECK(a[i].alignment == b[i].alignment);
}

TEST_CASE("short sequences and bad probabilities are rejected") {
  Rng rng(0);
  CorruptionConfig cfg;
  CHECK_THROWS_AS(corrupt(numbered(1), cfg, rng), Error);
  cfg.deletion_prob = 1.5;
  CHECK_THROWS_AS(cfg.validate(), Error);
}

TEST_CASE("ordering examples map ranks to scrambled positions") {
  const auto set = make_ordering_set({numbered(5, "z")}, 2, 44);
  REQUIRE(set.size() == 2);
  for (const auto& ex : set) {
    REQUIRE(ex.gold.size() == 5);
    for (int rank = 0; rank < 5; ++rank) {
      CHECK(ex.events[static_cast<std::size_t>(ex.gold[rank])].predicate() ==
            "did" + std::to_string(rank));
    }
    const auto back = ordering_from_json(nlohmann::json::parse(ordering_to_json(ex).dump()));
    CHECK(back.gold == ex.gold);
    CHECK(back.source_id == "z");
  }
}

TEST_CASE("example JSON round-trips") {
  Rng rng(5);
  CorruptionConfig cfg;
  cfg.deletion_prob = 0.3;
  const auto ex = corrupt(numbered(6, "q"), cfg, rng);
  const auto back = example_from_json(nlohmann::json::parse(example_to_json(ex).dump()));
  CHECK(back.alignment == ex.alignment);
  CHECK(back.input_events.size() == ex.input_events.size());
  CHECK(back.target.source_id == "q");
}
