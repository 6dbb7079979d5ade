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
#include <filesystem>
#include <numeric>

#include "core/baselines.hpp"
#include "core/error.hpp"

using namespace tempo;
using namespace tempo::baselines;
using events::Event;

namespace {

// Best linear order by dynamic programming over subsets: the value of a set
// is the best value of the set without its last element plus the pairs that
// element closes.
std::vector<int> subset_dp_order(const ScoreMatrix& b) {
  const int n = static_cast<int>(b.rows());
  const int full = (1 << n) - 1;
  std::vector<double> best(static_cast<std::size_t>(full + 1), -1e300);
  std::vector<int> last(static_cast<std::size_t>(full + 1), -1);
  best[0] = 0.0;
  for (int mask = 1; mask <= full; ++mask) {
    for (int j = 0; j < n; ++j) {
      if (!(mask & (1 << j))) continue;
      const int prev = mask ^ (1 << j);
      double gain = 0.0;
      for (int i = 0; i < n; ++i) {
        if (prev & (1 << i)) gain += b(i, j);
      }
      const double v = best[static_cast<std::size_t>(prev)] + gain;
      if (v > best[static_cast<std::size_t>(mask)]) {
        best[static_cast<std::size_t>(mask)] = v;
        last[static_cast<std::size_t>(mask)] = j;
      }
    }
  }
  std::vector<int> order;
  for (int mask = full; mask; mask ^= 1 << last[static_cast<std::size_t>(mask)]) {
    order.push_back(last[static_cast<std::size_t>(mask)]);
  }
  std::reverse(order.begin(), order.end());
  return order;
}

ScoreMatrix random_scores(int n, Rng& rng) {
  ScoreMatrix b = ScoreMatrix::Zero(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      if (i != j) b(i, j) = rng.normal();
    }
  }
  return b;
}

BaselineConfig small_config(int vocab) {
  BaselineConfig c;
  c.vocab_size = vocab;
  c.d_model = 16;
  c.n_heads = 2;
  c.n_layers = 1;
  c.d_ff = 32;
  c.scorer_hidden = 16;
  c.max_len = 64;
  c.dropout = 0.0;
  return c;
}

std::vector<Event> letters(int n) {
  std::vector<Event> out;
  for (int i = 0; i < n; ++i) {
    out.push_back(Event::from_roles({{"ARG0", "x"}, {"V", std::string(1, static_cast<char>('a' + i))}}));
  }
  return out;
}

}  // namespace

TEST_CASE("order score sums precedence scores") {
  ScoreMatrix b = ScoreMatrix::Zero(3, 3);
  b(0, 1) = 1.0;
  b(1, 2) = 2.0;
  b(2, 0) = 5.0;
  CHECK(order_score(b, {0, 1, 2}) == doctest::Approx(3.0));
  CHECK(order_score(b, {2, 0, 1}) == doctest::Approx(6.0));
}

TEST_CASE("global decode matches subset dynamic programming") {
  Rng rng(12);
  for (int n = 2; n <= 7; ++n) {
    for (int trial = 0; trial < 30; ++trial) {
      const auto b = random_scores(n, rng);
      CHECK(global_decode(b) == subset_dp_order(b));
    }
  }
}

TEST_CASE("global decode takes the lexicographically first of tied orders") {
  CHECK(global_decode(ScoreMatrix::Zero(4, 4)) == std::vector<int>{0, 1, 2, 3});
}

TEST_CASE("exact search refuses more than eight events") {
  try {
    global_decode(ScoreMatrix::Zero(9, 9));
    FAIL("expected size-limit error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kSizeLimit);
  }
}

TEST_CASE("misordered pairs count discordant pairs") {
  CHECK(misordered_pairs({0, 1, 2}, {0, 1, 2}) == 0);
  CHECK(misordered_pairs({2, 1, 0}, {0, 1, 2}) == 3);
  CHECK(misordered_pairs({0, 2, 1}, {0, 1, 2}) == 1);
}

TEST_CASE("structured hinge is zero once the gold order wins by the margin") {
  ScoreMatrix b = ScoreMatrix::Zero(3, 3);
  b(0, 1) = b(0, 2) = b(1, 2) = 2.0;
  auto r = ssvm_loss(b, {0, 1, 2});
  CHECK(r.loss == doctest::Approx(0.0));
  CHECK(r.violator == std::vector<int>{0, 1, 2});

  const ScoreMatrix flat = ScoreMatrix::Zero(3, 3);
  r = ssvm_loss(flat, {0, 1, 2});
  CHECK(r.loss == doctest::Approx(3.0));
  CHECK(r.violator == std::vector<int>{2, 1, 0});
}

TEST_CASE("ordered pairs enumerate all off-diagonal cells") {
  const auto p = ordered_pairs(3);
  CHECK(p.size() == 6);
  for (const auto& [i, j] : p) CHECK(i != j);
}

TEST_CASE("pairwise model produces an n by n score matrix") {
  const auto events = letters(4);
  std::vector<std::string> texts{"[E] x a b c d"};
  const auto vocab = text::build_vocab(texts, 1, 8);
  PairwiseModel model(small_config(vocab.size()));
  for (auto mode : {EncodeMode::kFull, EncodeMode::kPerEvent}) {
    const auto b = model.scores(vocab, events, mode);
    REQUIRE(b.rows() == 4);
    REQUIRE(b.cols() == 4);
    for (int i = 0; i < 4; ++i) CHECK(b(i, i) == 0.0);
  }
}

TEST_CASE("per-event encoding ignores the other events") {
  const auto vocab = text::build_vocab({"[E] x a b c d"}, 1, 8);
  PairwiseModel model(small_config(vocab.size()));
  auto evs = letters(3);
  const auto b1 = model.scores(vocab, evs, EncodeMode::kPerEvent);
  evs[2] = Event::from_roles({{"ARG0", "x"}, {"V", "d"}});
  const auto b2 = model.scores(vocab, evs, EncodeMode::kPerEvent);
  CHECK(b1(0, 1) == doctest::Approx(b2(0, 1)).epsilon(1e-5));
}

TEST_CASE("pairwise training fits a fixed order") {
  const auto vocab = text::build_vocab({"[E] x a b c d"}, 1, 8);
  PairwiseModel model(small_config(vocab.size()));
  std::vector<corruption::OrderingExample> data;
  const auto evs = letters(3);
  data.push_back({{evs[2], evs[0], evs[1]}, {1, 2, 0}, "s"});
  data.push_back({{evs[1], evs[2], evs[0]}, {2, 0, 1}, "s"});
  seq2seq::TrainConfig tc;
  tc.learning_rate = 3e-3;
  tc.warmup_steps = 5;
  tc.total_steps = 120;
  tc.batch_size = 2;
  train_pairwise(model, vocab, data, tc);
  for (const auto& ex : data) CHECK(global_decode(model.scores(vocab, ex.events)) == ex.gold);
}

TEST_CASE("pointer network decodes a permutation and learns a fixed order") {
  const auto vocab = text::build_vocab({"[E] x a b c d"}, 1, 8);
  PointerModel model(small_config(vocab.size()));
  const auto evs = letters(4);
  std::vector<corruption::OrderingExample> data{{{evs[3], evs[1], evs[0], evs[2]}, {2, 1, 3, 0}, "p"}};
  auto first = model.decode(vocab, data[0].events);
  std::sort(first.begin(), first.end());
  CHECK(first == std::vector<int>{0, 1, 2, 3});

  const auto state = model.begin(vocab, data[0].events);
  const auto dist = model.step_distribution(state);
  CHECK(std::accumulate(dist.begin(), dist.end(), 0.0) == doctest::Approx(1.0));

  seq2seq::TrainConfig tc;
  tc.learning_rate = 5e-3;
  tc.warmup_steps = 5;
  tc.total_steps = 150;
  tc.batch_size = 1;
  train_pointer(model, vocab, data, tc);
  CHECK(model.decode(vocab, data[0].events) == data[0].gold);
}

TEST_CASE("baseline checkpoints round-trip") {
  const auto vocab = text::build_vocab({"[E] x a b c d"}, 1, 8);
  const auto dir = std::filesystem::temp_directory_path();
  const auto evs = letters(3);

  PairwiseModel pw(small_config(vocab.size()));
  save_pairwise((dir / "tempo_pw.ckpt").string(), pw);
  const auto pw2 = load_pairwise((dir / "tempo_pw.ckpt").string());
  CHECK(pw.scores(vocab, evs).isApprox(pw2.scores(vocab, evs)));

  PointerModel pn(small_config(vocab.size()));
  save_pointer((dir / "tempo_pn.ckpt").string(), pn);
  const auto pn2 = load_pointer((dir / "tempo_pn.ckpt").string());
  CHECK(pn.decode(vocab, evs) == pn2.decode(vocab, evs));
  CHECK_THROWS_AS(load_pairwise((dir / "tempo_pn.ckpt").string()), Error);
  std::filesystem::remove(dir / "tempo_pw.ckpt");
  std::filesystem::remove(dir / "tempo_pn.ckpt");
}
