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

#include "core/vocab.hpp"

using namespace tempo::text;

TEST_CASE("tokenizer splits digits and keeps case") {
  const auto toks = tokenize("Met June in 1999, [E2] ok");
  const std::vector<std::string> want{"Met", "June", "in", "1", "9", "9", "9", ",", "[E2]", "ok"};
  CHECK(toks == want);
  const auto whole = tokenize("in 1999", false);
  CHECK(whole == std::vector<std::string>{"in", "1999"});
}

TEST_CASE("specials occupy fixed ids") {
  const auto v = build_vocab({"[E1] walked [A] he walked"}, 1, 4);
  CHECK(v.id("<pad>") == kPad);
  CHECK(v.token(kEvent) == "[E]");
  CHECK(v.token(kArg) == "[A]");
  CHECK(v.tag_id(1) == kFirstIndexedTag);
  CHECK(v.tag_id(4) == kFirstIndexedTag + 3);
  CHECK(v.is_event_tag(kEvent));
  CHECK(v.is_event_tag(v.tag_id(2)));
  CHECK_FALSE(v.is_event_tag(kArg));
  CHECK(v.num_specials() == kFirstIndexedTag + 4);
}

TEST_CASE("encode and decode round-trip known text") {
  const auto v = build_vocab({"the cat sat in 2020", "[E] a dog"}, 1, 4);
  const std::string text = "[E] the cat sat in 2 0 2 0";
  CHECK(v.decode(v.encode(text)) == text);
  CHECK(v.encode("zebra")[0] == kUnk);
}

TEST_CASE("min_count drops rare tokens") {
  const auto v = build_vocab({"a a b"}, 2, 2);
  CHECK(v.contains("a"));
  CHECK_FALSE(v.contains("b"));
}

TEST_CASE("vocabulary file round-trip") {
  const auto v = build_vocab({"alpha beta 42"}, 1, 3);
  const auto path = (std::filesystem::temp_directory_path() / "tempo_vocab_test.json").string();
  v.save(path);
  const auto back = Vocab::load(path);
  CHECK(back.size() == v.size());
  CHECK(back.id("beta") == v.id("beta"));
  CHECK(back.max_index() == 3);
  std::filesystem::remove(path);
}
