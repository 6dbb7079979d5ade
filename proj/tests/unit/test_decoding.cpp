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

#include <cmath>
#include <map>

#include "core/decoding.hpp"
#include "core/error.hpp"

using namespace tempo;
using namespace tempo::decoding;
using events::Event;
using events::TagScheme;
using events::TagVariant;

namespace {

const TagScheme kIndexed{TagVariant::kIndexed, 8};
const TagScheme kPlain{TagVariant::kPlain, 8};

Event ev(const std::string& a0, const std::string& v, const std::string& a1) {
  return Event::from_roles({{"ARG0", a0}, {"V", v}, {"ARG1", a1}});
}

struct Fixture {
  std::vector<Event> events{ev("she", "woke", "up early"), ev("she", "made", "coffee"),
                            ev("she", "left", "the house"), ev("he", "read", "a book")};
  text::Vocab vocab;
  Model model;

  Fixture()
      : vocab(text::build_vocab({"[E] she woke up early made coffee left the house he read a book"},
                                1, 8)),
        model([&] {
          seq2seq::ModelConfig c;
          c.vocab_size = vocab.size();
          c.d_model = 16;
          c.n_heads = 2;
          c.n_enc_layers = 1;
          c.n_dec_layers = 1;
          c.d_ff = 32;
          c.max_len = 96;
          c.seed = 21;
          return c;
        }()) {}
};

}  // namespace

TEST_CASE("nucleus sampling keeps only the top-p mass") {
  Rng rng(1);
  const std::vector<float> logits{5.0f, 1.0f, 0.0f, -1.0f};
  const std::vector<char> none(4, 0);
  for (int i = 0; i < 200; ++i) CHECK(sample_nucleus(logits, 0.5, none, rng) == 0);

  std::vector<char> ban(4, 0);
  ban[0] = 1;
  for (int i = 0; i < 200; ++i) CHECK(sample_nucleus(logits, 0.9, ban, rng) != 0);
}

TEST_CASE("nucleus sampling with p = 1 follows the softmax") {
  Rng rng(2);
  const std::vector<float> logits{0.0f, std::log(3.0f)};
  const std::vector<char> none(2, 0);
  int ones = 0;
  const int n = 20000;
  for (int i = 0; i < n; ++i) ones += sample_nucleus(logits, 1.0, none, rng);
  CHECK(static_cast<double>(ones) / n == doctest::Approx(0.75).epsilon(0.03));
}

TEST_CASE("a fully banned distribution is an error") {
  Rng rng(3);
  const std::vector<float> logits{1.0f, 2.0f};
  CHECK_THROWS_AS(sample_nucleus(logits, 0.8, std::vector<char>{1, 1}, rng), Error);
}

TEST_CASE("beam size one reproduces greedy decoding") {
  Fixture f;
  const auto src = encode_input(f.vocab, f.events, kIndexed);
  DecodeConfig cfg;
  cfg.beam_size = 1;
  cfg.max_decode_len = 20;
  const auto beams = beam_search(f.model, src, cfg);
  REQUIRE(beams.size() == 1);
  CHECK(beams[0].tokens == greedy_decode(f.model, src, 20));
}

TEST_CASE("beam scores are log-probabilities of their token sequences") {
  Fixture f;
  const auto src = encode_input(f.vocab, f.events, kIndexed);
  DecodeConfig cfg;
  cfg.beam_size = 3;
  cfg.max_decode_len = 12;
  const auto beams = beam_search(f.model, src, cfg);
  REQUIRE_FALSE(beams.empty());
  for (std::size_t i = 0; i < beams.size(); ++i) {
    CHECK(beams[i].score <= 0.0);
    double total = 0.0;
    for (double lp : token_log_probs(f.model, src, beams[i].tokens)) total += lp;
    if (beams[i].finished) CHECK(total == doctest::Approx(beams[i].score).epsilon(1e-3));
  }
  for (std::size_t i = 1; i < beams.size(); ++i) {
    if (beams[i - 1].finished == beams[i].finished) CHECK(beams[i - 1].score >= beams[i].score);
    CHECK((beams[i - 1].finished || !beams[i].finished));
  }
}

TEST_CASE("tag-only score bounds the full score from above") {
  Fixture f;
  Rng rng(8);
  for (int trial = 0; trial < 20; ++trial) {
    auto cand = f.events;
    rng.shuffle(cand);
    const auto s = score_candidate(f.model, f.vocab, f.events, cand, kIndexed);
    CHECK(s.log_gen <= s.log_tag + 1e-9);
    CHECK(s.log_tag <= 0.0);
    CHECK(score_gen(f.model, f.vocab, f.events, cand, kIndexed) == doctest::Approx(s.log_gen));
  }
  CHECK_THROWS_AS(score_tag(f.model, f.vocab, f.events, f.events, kPlain), Error);
}

TEST_CASE("alignment prefers tags, then predicates, then appends") {
  const std::vector<Event> input{ev("a", "ran", "fast"), ev("b", "sat", "down"),
                                 ev("c", "ate", "food")};
  const auto segs = events::parse_generated(
      "[E3] ate [A] c ate food [E] ran [A] a ran fast [E3] ate [A] again", kIndexed);
  const auto a = align_output(input, segs, kIndexed);
  CHECK(a.order == std::vector<int>{2, 0, 1});
  REQUIRE(a.source.size() == 3);
  CHECK(a.source[0] == AlignSource::kTag);
  CHECK(a.source[1] == AlignSource::kPredicate);
  CHECK(a.source[2] == AlignSource::kAppended);
}

TEST_CASE("plain-scheme alignment breaks predicate ties by overlap") {
  const std::vector<Event> input{ev("the cat", "ate", "fish"), ev("the dog", "ate", "meat")};
  const auto segs =
      events::parse_generated("[E] ate [A] the dog ate meat [E] ate [A] the cat ate fish", kPlain);
  CHECK(align_output(input, segs, kPlain).order == std::vector<int>{1, 0});
}

TEST_CASE("ordering output is always a permutation") {
  Fixture f;
  DecodeConfig cfg;
  cfg.beam_size = 2;
  cfg.max_decode_len = 40;
  const auto p = order_events(f.model, f.vocab, f.events, kIndexed, cfg);
  auto sorted = p.order;
  std::sort(sorted.begin(), sorted.end());
  CHECK(sorted == std::vector<int>{0, 1, 2, 3});
  for (int r = 0; r < 4; ++r) CHECK(p.order[static_cast<std::size_t>(p.rank[static_cast<std::size_t>(r)])] == r);
  CHECK_THROWS_AS(order_events(f.model, f.vocab, {f.events[0]}, kIndexed, cfg), Error);
}

TEST_CASE("scoring-based ordering picks the best permutation") {
  Fixture f;
  const std::vector<Event> three(f.events.begin(), f.events.begin() + 3);
  const auto p = order_by_scoring(f.model, f.vocab, three, kIndexed, ScoreMode::kGen);
  std::vector<int> perm{0, 1, 2};
  double best = -1e300;
  std::vector<int> want;
  do {
    std::vector<Event> cand;
    for (int i : perm) cand.push_back(three[static_cast<std::size_t>(i)]);
    const double s = score_gen(f.model, f.vocab, three, cand, kIndexed);
    if (s > best) {
      best = s;
      want = perm;
    }
  } while (std::next_permutation(perm.begin(), perm.end()));
  CHECK(p.order == want);
}

TEST_CASE("insertion ranking covers every slot once") {
  Fixture f;
  const std::vector<Event> seeds(f.events.begin(), f.events.begin() + 3);
  const auto r = rank_insertions(f.model, f.vocab, seeds, f.events[3], kIndexed);
  auto sorted = r.ranked_positions;
  std::sort(sorted.begin(), sorted.end());
  CHECK(sorted == std::vector<int>{0, 1, 2, 3});
  REQUIRE(r.gen_scores.size() == 4);
  REQUIRE(r.tag_scores.size() == 4);
  for (std::size_t i = 1; i < r.ranked_positions.size(); ++i) {
    CHECK(r.gen_scores[static_cast<std::size_t>(r.ranked_positions[i - 1])] >=
          r.gen_scores[static_cast<std::size_t>(r.ranked_positions[i])]);
  }
}

TEST_CASE("infilling never emits a seed predicate token") {
  Fixture f;
  const std::vector<Event> seeds(f.events.begin(), f.events.begin() + 3);
  DecodeConfig cfg;
  cfg.max_decode_len = 12;
  cfg.nucleus_p = 0.95;
  int parsed = 0;
  for (int s = 0; s < 40; ++s) {
    cfg.seed = static_cast<std::uint64_t>(s);
    try {
      const auto r = infill(f.model, f.vocab, {seeds, 1}, kIndexed, cfg);
      ++parsed;
      for (int tok : r.tokens) CHECK(r.banned.count(tok) == 0);
      CHECK(r.tokens.front() == text::kEvent);
      CHECK(r.banned.count(f.vocab.id("woke")) == 1);
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::kParse);
    }
  }
  CHECK(parsed > 0);
  CHECK_THROWS_AS(infill(f.model, f.vocab, {seeds, 4}, kIndexed, cfg), Error);
}

TEST_CASE("segments become events split around the predicate") {
  events::ParsedSegment seg;
  seg.predicate = "made";
  seg.body = "she made coffee";
  const auto e = event_from_segment(seg);
  REQUIRE(e.has_value());
  CHECK(e->predicate() == "made");
  REQUIRE(e->constituents().size() == 3);
  CHECK(e->constituents()[0].text == "she");
  CHECK(e->constituents()[2].text == "coffee");
  seg.malformed = true;
  CHECK_FALSE(event_from_segment(seg).has_value());
}

TEST_CASE("decode configuration validation") {
  DecodeConfig c;
  c.nucleus_p = 0.0;
  CHECK_THROWS_AS(c.validate(), Error);
  c = DecodeConfig{};
  c.beam_size = 0;
  CHECK_THROWS_AS(c.validate(), Error);
  const auto back = DecodeConfig::from_json(nlohmann::json::parse(DecodeConfig{}.to_json().dump()));
  CHECK(back.beam_size == 4);
  CHECK(back.nucleus_p == doctest::Approx(0.8));
}
