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

#include "core/error.hpp"
#include "core/eval.hpp"

using namespace tempo;
using namespace tempo::eval;
using datasets::TemporalRelation;
using events::Event;

namespace {

events::EventSequence chain(int n, const std::string& id) {
  events::EventSequence s;
  s.source_id = id;
  for (int i = 0; i < n; ++i) s.events.push_back(Event::from_roles({{"V", "v" + std::to_string(i)}}));
  return s;
}

}  // namespace

TEST_CASE("pairwise accuracy counts concordant pairs") {
  CHECK(pairwise_accuracy({0, 1, 2}, {0, 2, 1}) == doctest::Approx(2.0 / 3.0));
  CHECK(pairwise_accuracy({0, 1, 2}, {2, 1, 0}) == 0.0);
  CHECK(pairwise_accuracy({1, 0}, {1, 0}) == 1.0);
  CHECK_THROWS_AS(pairwise_accuracy({0, 1}, {0, 1, 2}), Error);
  CHECK_THROWS_AS(pairwise_accuracy({0}, {0}), Error);
}

TEST_CASE("ranking exact match at one and two") {
  auto h = ranking_em(2, {2, 0, 1});
  CHECK(h.top1);
  CHECK(h.topk);
  h = ranking_em(0, {2, 0, 1});
  CHECK_FALSE(h.top1);
  CHECK(h.topk);
  h = ranking_em(1, {2, 0, 1});
  CHECK_FALSE(h.topk);
}

TEST_CASE("before/after reads the answer's rank against the question's") {
  const auto o = before_after_eval({1, 0, 2}, 0, 1, TemporalRelation::kBefore);
  CHECK(o.predicted == TemporalRelation::kBefore);
  CHECK(o.correct);
  CHECK(before_after_eval({0, 1}, 0, 1, TemporalRelation::kBefore).predicted ==
        TemporalRelation::kAfter);
}

TEST_CASE("F1 treats empty denominators as zero") {
  CHECK(f1_score(0, 0, 0) == 0.0);
  CHECK(f1_score(1, 1, 0) == doctest::Approx(2.0 / 3.0));
}

TEST_CASE("predict-all-after on a 530/55 split gives macro F1 0.475") {
  std::vector<TemporalRelation> gold(530, TemporalRelation::kAfter);
  gold.insert(gold.end(), 55, TemporalRelation::kBefore);
  const std::vector<TemporalRelation> pred(585, TemporalRelation::kAfter);
  const auto m = classification_metrics(pred, gold);
  CHECK(m.n == 585);
  CHECK(m.accuracy == doctest::Approx(530.0 / 585.0));
  CHECK(m.f1_before == 0.0);
  CHECK(m.macro_f1 == doctest::Approx(0.475).epsilon(0.001));
}

TEST_CASE("ordering evaluation aggregates and records failures") {
  std::vector<corruption::OrderingExample> set{
      {chain(3, "a").events, {0, 1, 2}, "a"},
      {chain(2, "b").events, {1, 0}, "b"},
      {chain(3, "c").events, {2, 0, 1}, "c"},
  };
  int calls = 0;
  const Orderer orderer = [&](const std::vector<Event>& evs) -> std::vector<int> {
    if (++calls == 3) throw Error(ErrorCode::kParse, "bad output");
    std::vector<int> o(evs.size());
    for (std::size_t i = 0; i < o.size(); ++i) o[i] = static_cast<int>(i);
    return o;
  };
  const auto ev = evaluate_ordering(orderer, set);
  CHECK(ev.report.n_examples == 3);
  CHECK(ev.report.n_errors == 1);
  CHECK(*ev.report.pairwise_accuracy == doctest::Approx(0.5));
  CHECK(*ev.report.exact_match == doctest::Approx(0.5));
  CHECK(*ev.report.n_long == 1);
  CHECK_FALSE(ev.predictions[2].has_value());
  const auto j = ev.report.to_json();
  CHECK(j["task"] == "ordering");
  CHECK(j.contains("length_at_least_3"));
}

TEST_CASE("insertion cases remove one interior or boundary event") {
  const auto cases = make_insertion_cases({chain(4, "x"), chain(5, "y")}, 3);
  REQUIRE(cases.size() == 2);
  for (const auto& c : cases) {
    CHECK(c.gold_position >= 0);
    CHECK(c.gold_position <= static_cast<int>(c.seed_events.size()));
    CHECK(c.new_event.predicate() == "v" + std::to_string(c.gold_position));
  }
  const auto ev = evaluate_insertion(
      [](const InsertionCase& c) {
        std::vector<int> r;
        r.push_back(c.gold_position);
        for (int p = 0; p <= static_cast<int>(c.seed_events.size()); ++p) {
          if (p != c.gold_position) r.push_back(p);
        }
        return r;
      },
      cases);
  CHECK(*ev.report.exact_match == 1.0);
  CHECK(*ev.report.top2_exact_match == 1.0);
}

TEST_CASE("scaling CSV has a header and one row per point") {
  const auto csv = scaling_csv({{100, 0.7, 0.3, 0.4, 1.2}, {200, 0.8, 0.4, 0.5, 1.0}});
  CHECK(csv.rfind("n_sequences,", 0) == 0);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 3);
}
