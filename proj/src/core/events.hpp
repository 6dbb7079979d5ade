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

#ifndef TEMPO_CORE_EVENTS_HPP_
#define TEMPO_CORE_EVENTS_HPP_

#include <optional>
#include <set>
#include <string>
#include <vector>

#include "json.hpp"

namespace tempo::events {

enum class ConstituentKind { kPredicate, kArgument };

struct Constituent {
  ConstituentKind kind = ConstituentKind::kArgument;
  std::string role;
  std::string text;

  bool operator==(const Constituent&) const = default;
};

// A predicate with its role-labeled arguments in surface order. Construction
// validates that there is exactly one predicate and no blank text.
class Event {
 public:
  explicit Event(std::vector<Constituent> constituents, int sentence = -1);

  // Convenience for tests and generators: {"ARG0", "he"}, {"V", "tell"}, ...
  // The role "V" marks the predicate.
  static Event from_roles(
      const std::vector<std::pair<std::string, std::string>>& roles,
      int sentence = -1);

  const std::vector<Constituent>& constituents() const { return constituents_; }
  const std::string& predicate() const;
  int sentence() const { return sentence_; }

  // Constituent identity only; the sentence index is bookkeeping.
  bool operator==(const Event& other) const {
    return constituents_ == other.constituents_;
  }

 private:
  std::vector<Constituent> constituents_;
  std::size_t predicate_index_ = 0;
  int sentence_ = -1;
};

struct EventSequence {
  std::vector<Event> events;
  std::string source_id;
};

struct SrlDocument {
  std::string id;
  std::vector<std::vector<Event>> sentences;
};

enum class TagVariant { kPlain, kIndexed };

inline constexpr const char* kArgTag = "[A]";
inline constexpr const char* kEventTag = "[E]";

struct TagScheme {
  TagVariant variant = TagVariant::kIndexed;
  int max_index = 16;

  // "[E]" for the plain variant or number == 0, otherwise "[E<number>]".
  std::string tag(int number) const;
};

TagScheme parse_scheme(const std::string& name, int max_index = 16);
std::string scheme_name(const TagScheme& scheme);

struct Rendered {
  std::string text;
  bool degenerate = false;
};

std::string render_event(const Event& e);

Rendered render_input(const std::vector<Event>& events, const TagScheme& scheme);

// input_map[j] names the input slot (0-based) that target event j copies, if
// any. Only consulted by the indexed variant.
std::string render_target(const std::vector<Event>& events,
                          const TagScheme& scheme,
                          const std::vector<std::optional<int>>& input_map = {});

struct ParsedSegment {
  std::optional<int> tag;  // the number inside [E<n>]; empty for [E]
  std::string predicate;
  std::string body;
  bool malformed = false;
};

bool is_event_tag(const std::string& token, std::optional<int>* number = nullptr);

std::vector<ParsedSegment> parse_generated(const std::string& text,
                                           const TagScheme& scheme);

// Lowercased, punctuation-stripped argument tokens that are not stopwords.
std::set<std::string> content_tokens(const Event& e,
                                     const std::set<std::string>& stopwords);

std::vector<EventSequence> extract_chains(const SrlDocument& doc,
                                          const std::set<std::string>& stopwords);

std::set<std::string> load_stopwords(const std::string& path);

// JSONL record formats.
nlohmann::ordered_json event_to_json(const Event& e);
Event event_from_json(const nlohmann::json& j, int sentence = -1);
nlohmann::ordered_json sequence_to_json(const EventSequence& seq);
EventSequence sequence_from_json(const nlohmann::json& j);
SrlDocument document_from_json(const nlohmann::json& j);

std::vector<nlohmann::json> read_jsonl(const std::string& path);
void write_jsonl(const std::string& path,
                 const std::vector<nlohmann::ordered_json>& records);

// Flat sequences pass through; documents are turned into entity chains.
std::vector<EventSequence> load_sequences(const std::string& path,
                                          const std::set<std::string>& stopwords);

}  // namespace tempo::events

#endif  // TEMPO_CORE_EVENTS_HPP_
