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

#include "core/error.hpp"
#include "core/experiments.hpp"

using namespace tempo;
using namespace tempo::experiments;

TEST_CASE("presets carry their schedules") {
  const auto toy = RunConfig::toy();
  CHECK(toy.train.learning_rate == doctest::Approx(1e-3));
  CHECK(toy.model.d_model == 64);
  const auto paper = RunConfig::paper();
  CHECK(paper.train.learning_rate == doctest::Approx(1e-5));
  CHECK(paper.train.warmup_steps == 500);
  CHECK(paper.train.batch_size == 64);
  CHECK(paper.corruption.deletion_prob == doctest::Approx(0.15));
  CHECK(paper.corruption.permutations_per_sequence == 2);
  CHECK(paper.decode.beam_size == 4);
  CHECK(paper.decode.nucleus_p == doctest::Approx(0.8));
  CHECK_THROWS_AS(RunConfig::named_preset("huge"), Error);
}

TEST_CASE("config JSON patches the chosen preset") {
  const auto c = RunConfig::from_json(nlohmann::json::parse(
      R"({"preset": "paper", "train": {"batch_size": 8}, "seed": 5})"));
  CHECK(c.preset == "paper");
  CHECK(c.train.batch_size == 8);
  CHECK(c.train.learning_rate == doctest::Approx(1e-5));
  CHECK(c.seed == 5);
  const auto back = RunConfig::from_json(nlohmann::json::parse(c.to_json().dump()));
  CHECK(config_hash(back) == config_hash(c));
}

TEST_CASE("unknown or mistyped keys are config-parse errors") {
  for (const char* text : {R"({"trian": {}})", R"({"train": {"batch": 3}})",
                           R"({"train": {"batch_size": "big"}})"}) {
    try {
      RunConfig::from_json(nlohmann::json::parse(text));
      FAIL("accepted " << text);
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::kConfigParse);
    }
  }
}

TEST_CASE("config hash is stable and sensitive") {
  auto a = RunConfig::toy();
  auto b = RunConfig::toy();
  CHECK(config_hash(a) == config_hash(b));
  CHECK(config_hash(a).size() == 16);
  b.seed = 99;
  CHECK(config_hash(a) != config_hash(b));
  CHECK(hex64(fnv1a64("")) == "cbf29ce484222325");
}

TEST_CASE("ordering mode names round-trip") {
  for (auto m : {OrderingMode::kGenerate, OrderingMode::kScoreGen, OrderingMode::kScoreTag}) {
    CHECK(parse_ordering_mode(ordering_mode_name(m)) == m);
  }
  CHECK_THROWS_AS(parse_ordering_mode("guess"), Error);
}

TEST_CASE("model kinds dispatch") {
  auto cfg = RunConfig::toy();
  cfg.model.d_model = 16;
  cfg.model.d_ff = 32;
  cfg.baseline.d_model = 16;
  cfg.baseline.d_ff = 32;
  const auto vocab = text::build_vocab({"[E] a b c"}, 1, 16);
  CHECK(model_kind(new_model("seq2seq", cfg, vocab)) == "seq2seq");
  CHECK(model_kind(new_model("pairwise", cfg, vocab)) == "pairwise");
  CHECK(model_kind(new_model("pointer", cfg, vocab)) == "pointer");
  CHECK_THROWS_AS(new_model("oracle", cfg, vocab), Error);
}

TEST_CASE("held-out schema sequences never repeat a training sequence") {
  const auto schemas = datasets::load_schemas(TEMPO_DATA_DIR "/schemas.txt");
  const auto split = schema_split(schemas, 300, 100, 4);
  CHECK(split.train.size() == 300);
  CHECK(split.held_out.size() == 100);
  std::set<std::string> train;
  auto key = [](const events::EventSequence& s) {
    std::string k;
    for (const auto& e : s.events) k += events::render_event(e) + "|";
    return k;
  };
  for (const auto& s : split.train) train.insert(key(s));
  for (const auto& s : split.held_out) CHECK(train.count(key(s)) == 0);
}
