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

#include "vocab.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <map>
#include <sstream>

#include "error.hpp"
#include "events.hpp"

namespace tempo::text {
namespace {

constexpr const char* kHeaderMagic = "#tempo-vocab";
constexpr int kFormatVersion = 1;

bool is_sentence_punct(char c) {
  return c == '.' || c == ',' || c == '!' || c == '?';
}

bool is_digit(char c) { return std::isdigit(static_cast<unsigned char>(c)); }

// Length of a tag token ([A], [E], [E12]) starting at pos, or 0.
std::size_t tag_length(const std::string& s, std::size_t pos) {
  if (s.compare(pos, 3, "[A]") == 0) return 3;
  const auto close = s.find(']', pos);
  if (close == std::string::npos) return 0;
  const std::string cand = s.substr(pos, close - pos + 1);
  return events::is_event_tag(cand) ? cand.size() : 0;
}

}  // namespace

std::vector<std::string> tokenize(const std::string& text, bool split_digits) {
  std::vector<std::string> out;
  std::istringstream in(text);
  std::string chunk;
  while (in >> chunk) {
    std::string cur;
    auto flush = [&] {
      if (!cur.empty()) out.push_back(std::move(cur));
      cur.clear();
    };
    for (std::size_t i = 0; i < chunk.size();) {
      const char c = chunk[i];
      if (c == '[') {
        if (const auto len = tag_length(chunk, i)) {
          flush();
          out.push_back(chunk.substr(i, len));
          i += len;
          continue;
        }
      }
      const bool digit_split = split_digits && is_digit(c);
      // A symbol wedged between digits ("2:30", "1,000") is its own token.
      const bool between_digits = split_digits && !is_digit(c) &&
                                  !std::isalpha(static_cast<unsigned char>(c)) &&
                                  i > 0 && is_digit(chunk[i - 1]) &&
                                  i + 1 < chunk.size() && is_digit(chunk[i + 1]);
      if (is_sentence_punct(c) || digit_split || between_digits) {
        flush();
        out.emplace_back(1, c);
      } else {
        cur += c;
      }
      ++i;
    }
    flush();
  }
  return out;
}

Vocab::Vocab(int max_index, bool split_digits)
    : max_index_(max_index), split_digits_(split_digits) {
  if (max_index < 1) {
    throw Error(ErrorCode::kInvalidArgument, "max_index must be >= 1");
  }
  for (const char* s : {"<pad>", "<s>", "</s>", "<unk>", "[A]", "[E]"}) add(s);
  for (int i = 1; i <= max_index; ++i) add("[E" + std::to_string(i) + "]");
}

void Vocab::add(const std::string& token) {
  token_to_id_.emplace(token, static_cast<int>(id_to_token_.size()));
  id_to_token_.push_back(token);
}

int Vocab::id(const std::string& token) const {
  const auto it = token_to_id_.find(token);
  return it == token_to_id_.end() ? kUnk : it->second;
}

const std::string& Vocab::token(int id) const {
  if (id < 0 || id >= size()) {
    throw Error(ErrorCode::kInvalidArgument,
                "token id out of range: " + std::to_string(id));
  }
  return id_to_token_[id];
}

int Vocab::tag_id(int number) const {
  if (number <= 0) return kEvent;
  if (number > max_index_) return kUnk;
  return kFirstIndexedTag + number - 1;
}

std::vector<int> Vocab::encode(const std::string& text) const {
  std::vector<int> ids;
  for (const auto& tok : tokenize(text, split_digits_)) ids.push_back(id(tok));
  return ids;
}

std::string Vocab::decode(std::span<const int> ids) const {
  std::string out;
  for (int id : ids) {
    if (id == kPad || id == kBos || id == kEos) continue;
    if (!out.empty()) out += ' ';
    out += token(id);
  }
  return out;
}

void Vocab::save(const std::string& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::kIo, "cannot write " + path);
  out << kHeaderMagic << "\tversion=" << kFormatVersion
      << "\tmax_index=" << max_index_
      << "\tsplit_digits=" << (split_digits_ ? 1 : 0)
      << "\tmin_count=" << min_count_ << '\n';
  for (const auto& t : id_to_token_) out << t << '\n';
}

Vocab Vocab::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kMissingFile, "cannot open " + path);
  std::string header;
  std::getline(in, header);
  std::istringstream hs(header);
  std::string field;
  hs >> field;
  if (field != kHeaderMagic) {
    throw Error(ErrorCode::kParse, path + ": not a vocab file");
  }
  std::map<std::string, int> kv;
  while (hs >> field) {
    const auto eq = field.find('=');
    if (eq == std::string::npos) continue;
    kv[field.substr(0, eq)] = std::stoi(field.substr(eq + 1));
  }
  if (kv["version"] != kFormatVersion || !kv.count("max_index")) {
    throw Error(ErrorCode::kParse, path + ": unsupported vocab header");
  }
  Vocab v(kv["max_index"], kv.count("split_digits") ? kv["split_digits"] != 0
                                                    : true);
  v.min_count_ = kv.count("min_count") ? kv["min_count"] : 1;
  std::string line;
  int id = 0;
  while (std::getline(in, line)) {
    if (id < v.num_specials()) {
      if (line != v.id_to_token_[id]) {
        throw Error(ErrorCode::kParse,
                    path + ": special token mismatch at id " +
                        std::to_string(id));
      }
    } else {
      if (line.empty() || v.token_to_id_.count(line)) {
        throw Error(ErrorCode::kParse, path + ": bad or duplicate token at id " +
                                           std::to_string(id));
      }
      v.add(line);
    }
    ++id;
  }
  if (id < v.num_specials()) {
    throw Error(ErrorCode::kParse, path + ": truncated vocab");
  }
  return v;
}

Vocab build_vocab(const std::vector<std::string>& corpus, int min_count,
                  int max_index, bool split_digits) {
  if (min_count < 1) {
    throw Error(ErrorCode::kInvalidArgument, "min_count must be >= 1");
  }
  Vocab v(max_index, split_digits);
  v.min_count_ = min_count;
  std::map<std::string, long> counts;
  for (const auto& line : corpus) {
    for (auto& tok : tokenize(line, split_digits)) {
      if (v.contains(tok)) continue;  // specials and tags
      if (tok.front() == '[' && events::is_event_tag(tok)) continue;
      ++counts[tok];
    }
  }
  std::vector<std::pair<std::string, long>> items(counts.begin(), counts.end());
  std::stable_sort(items.begin(), items.end(), [](const auto& a, const auto& b) {
    if (a.second != b.second) return a.second > b.second;
    return a.first < b.first;
  });
  for (const auto& [tok, n] : items) {
    if (n >= min_count) v.add(tok);
  }
  return v;
}

}  // namespace tempo::text
