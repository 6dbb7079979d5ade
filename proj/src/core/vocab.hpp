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

#ifndef TEMPO_CORE_VOCAB_HPP_
#define TEMPO_CORE_VOCAB_HPP_

#include <span>
#include <string>
#include <unordered_map>
#include <vector>

namespace tempo::text {

// Special ids, fixed: PAD BOS EOS UNK [A] [E] [E1] .. [E<max_index>].
inline constexpr int kPad = 0;
inline constexpr int kBos = 1;
inline constexpr int kEos = 2;
inline constexpr int kUnk = 3;
inline constexpr int kArg = 4;
inline constexpr int kEvent = 5;
inline constexpr int kFirstIndexedTag = 6;

// Splits on whitespace, keeps tag tokens whole, and isolates . , ! ? and
// (optionally) single digits along with any symbol sitting between digits.
std::vector<std::string> tokenize(const std::string& text,
                                  bool split_digits = true);

class Vocab {
 public:
  Vocab() : Vocab(16, true) {}
  Vocab(int max_index, bool split_digits);

  int size() const { return static_cast<int>(id_to_token_.size()); }
  int max_index() const { return max_index_; }
  bool split_digits() const { return split_digits_; }
  int min_count() const { return min_count_; }
  int num_specials() const { return kFirstIndexedTag + max_index_; }

  int id(const std::string& token) const;  // kUnk when absent
  const std::string& token(int id) const;
  bool contains(const std::string& token) const {
    return token_to_id_.count(token) > 0;
  }

  // [E<number>] id, or kEvent for number 0.
  int tag_id(int number) const;
  bool is_indexed_tag(int id) const {
    return id >= kFirstIndexedTag && id < kFirstIndexedTag + max_index_;
  }
  bool is_event_tag(int id) const { return id == kEvent || is_indexed_tag(id); }
  bool is_special(int id) const { return id < num_specials(); }

  std::vector<int> encode(const std::string& text) const;
  // Drops PAD/BOS/EOS and joins with single spaces.
  std::string decode(std::span<const int> ids) const;

  void save(const std::string& path) const;
  static Vocab load(const std::string& path);

  friend Vocab build_vocab(const std::vector<std::string>& corpus,
                           int min_count, int max_index, bool split_digits);

 private:
  void add(const std::string& token);

  int max_index_;
  bool split_digits_;
  int min_count_ = 1;
  std::vector<std::string> id_to_token_;
  std::unordered_map<std::string, int> token_to_id_;
};

// Corpus tokens with count >= min_count, ordered by (count desc, token asc).
Vocab build_vocab(const std::vector<std::string>& corpus, int min_count,
                  int max_index, bool split_digits = true);

}  // namespace tempo::text

#endif  // TEMPO_CORE_VOCAB_HPP_
