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

#include "events.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <sstream>

#include "error.hpp"

namespace tempo::events {
namespace {

std::vector<std::string> split_ws(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream in(text);
  std::string tok;
  while (in >> tok) out.push_back(tok);
  return out;
}

std::string join(const std::vector<std::string>& parts, std::size_t begin,
                 std::size_t end) {
  std::string out;
  for (std::size_t i = begin; i < end; ++i) {
    if (!out.empty()) out += ' ';
    out += parts[i];
  }
  return out;
}

std::string normalize_ws(const std::string& text) {
  const auto parts = split_ws(text);
  return join(parts, 0, parts.size());
}

}  // namespace

Event::Event(std::vector<Constituent> constituents, int sentence)
    : constituents_(std::move(constituents)), sentence_(sentence) {
  int predicates = 0;
  for (std::size_t i = 0; i < constituents_.size(); ++i) {
    auto& c = constituents_[i];
    c.text = normalize_ws(c.text);
    if (c.text.empty()) {
      throw Error(ErrorCode::kInvalidArgument,
                  "event constituent '" + c.role + "' has empty text");
    }
    if (c.kind == ConstituentKind::kPredicate) {
      ++predicates;
      predicate_index_ = i;
    }
  }
  if (predicates != 1) {
    throw Error(ErrorCode::kInvalidArgument,
                "event must have exactly one predicate, found " +
                    std::to_string(predicates));
  }
}

Event Event::from_roles(
    const std::vector<std::pair<std::string, std::string>>& roles,
    int sentence) {
  std::vector<Constituent> cs;
  cs.reserve(roles.size());
  for (const auto& [role, text] : roles) {
    cs.push_back({role == "V" ? ConstituentKind::kPredicate
                              : ConstituentKind::kArgument,
                  role, text});
  }
  return Event(std::move(cs), sentence);
}

const std::string& Event::predicate() const {
  return constituents_[predicate_index_].text;
}

std::string TagScheme::tag(int number) const {
  if (variant == TagVariant::kPlain || number <= 0) return kEventTag;
  return "[E" + std::to_string(number) + "]";
}

TagScheme parse_scheme(const std::string& name, int max_index) {
  if (name == "plain") return {TagVariant::kPlain, max_index};
  if (name == "indexed") return {TagVariant::kIndexed, max_index};
  throw Error(ErrorCode::kInvalidArgument, "unknown tag scheme: " + name);
}

std::string scheme_name(const TagScheme& scheme) {
  return scheme.variant == TagVariant::kPlain ? "plain" : "indexed";
}

std::string render_event(const Event& e) {
  std::string out;
  for (const auto& c : e.constituents()) {
    if (!out.empty()) out += ' ';
    out += c.text;
  }
  return out;
}

Rendered render_input(const std::vector<Event>& events,
                      const TagScheme& scheme) {
  if (scheme.variant == TagVariant::kIndexed &&
      static_cast<int>(events.size()) > scheme.max_index) {
    throw Error(ErrorCode::kSizeLimit,
                "too many events for indexed tags: " +
                    std::to_string(events.size()) + " > " +
                    std::to_string(scheme.max_index));
  }
  Rendered r;
  r.degenerate = events.empty();
  for (std::size_t i = 0; i < events.size(); ++i) {
    if (!r.text.empty()) r.text += ' ';
    r.text += scheme.tag(static_cast<int>(i) + 1);
    r.text += ' ';
    r.text += render_event(events[i]);
  }
  return r;
}

std::string render_target(const std::vector<Event>& events,
                          const TagScheme& scheme,
                          const std::vector<std::optional<int>>& input_map) {
  std::string out;
  for (std::size_t j = 0; j < events.size(); ++j) {
    int number = 0;
    if (j < input_map.size() && input_map[j].has_value()) {
      number = *input_map[j] + 1;
    }
    if (!out.empty()) out += ' ';
    out += scheme.tag(number);
    out += ' ';
    out += events[j].predicate();
    out += ' ';
    out += kArgTag;
    out += ' ';
    out += render_event(events[j]);
  }
  return out;
}

bool is_event_tag(const std::string& token, std::optional<int>* number) {
  if (token.size() < 3 || token[0] != '[' || token[1] != 'E' ||
      token.back() != ']') {
    return false;
  }
  if (token.size() == 3) {
    if (number) number->reset();
    return true;
  }
  int value = 0;
  for (std::size_t i = 2; i + 1 < token.size(); ++i) {
    if (!std::isdigit(static_cast<unsigned char>(token[i]))) return false;
    value = value * 10 + (token[i] - '0');
    if (value > 1000000) return false;
  }
  if (value == 0) return false;
  if (number) *number = value;
  return true;
}

std::vector<ParsedSegment> parse_generated(const std::string& text,
                                           const TagScheme& scheme) {
  const auto tokens = split_ws(text);
  std::vector<ParsedSegment> out;
  std::size_t i = 0;
  // Anything before the first tag is kept as a malformed, untagged segment.
  std::size_t first = 0;
  while (first < tokens.size() && !is_event_tag(tokens[first])) ++first;
  if (first > 0) {
    ParsedSegment junk;
    junk.body = join(tokens, 0, first);
    junk.malformed = true;
    out.push_back(std::move(junk));
  }
  i = first;
  while (i < tokens.size()) {
    ParsedSegment seg;
    std::optional<int> number;
    is_event_tag(tokens[i], &number);
    if (scheme.variant == TagVariant::kIndexed) seg.tag = number;
    std::size_t end = i + 1;
    while (end < tokens.size() && !is_event_tag(tokens[end])) ++end;
    std::size_t arg = i + 1;
    while (arg < end && tokens[arg] != kArgTag) ++arg;
    if (arg == end) {
      seg.predicate = join(tokens, i + 1, end);
      seg.malformed = true;
    } else {
      seg.predicate = join(tokens, i + 1, arg);
      seg.body = join(tokens, arg + 1, end);
      seg.malformed = seg.predicate.empty();
    }
    out.push_back(std::move(seg));
    i = end;
  }
  return out;
}

std::set<std::string> content_tokens(const Event& e,
                                     const std::set<std::string>& stopwords) {
  std::set<std::string> out;
  for (const auto& c : e.constituents()) {
    if (c.kind != ConstituentKind::kArgument) continue;
    for (const auto& raw : split_ws(c.text)) {
      std::string tok;
      for (char ch : raw) {
        const auto u = static_cast<unsigned char>(ch);
        if (std::ispunct(u)) continue;
        tok += static_cast<char>(std::tolower(u));
      }
      if (!tok.empty() && !stopwords.count(tok)) out.insert(tok);
    }
  }
  return out;
}

std::vector<EventSequence> extract_chains(
    const SrlDocument& doc, const std::set<std::string>& stopwords) {
  struct Node {
    int sentence;
    const Event* event;
    std::set<std::string> tokens;
  };
  std::vector<Node> nodes;
  for (std::size_t s = 0; s < doc.sentences.size(); ++s) {
    for (const auto& e : doc.sentences[s]) {
      nodes.push_back({static_cast<int>(s), &e, content_tokens(e, stopwords)});
    }
  }
  auto shares = [](const std::set<std::string>& a,
                   const std::set<std::string>& b) {
    auto ia = a.begin();
    auto ib = b.begin();
    while (ia != a.end() && ib != b.end()) {
      if (*ia == *ib) return true;
      if (*ia < *ib) ++ia; else ++ib;
    }
    return false;
  };

  // From every start event, greedily link to the earliest event in a later
  // sentence that shares a content token.
  std::vector<std::vector<std::size_t>> chains;
  for (std::size_t start = 0; start < nodes.size(); ++start) {
    std::vector<std::size_t> chain{start};
    std::size_t cur = start;
    for (;;) {
      std::size_t next = nodes.size();
      for (std::size_t k = cur + 1; k < nodes.size(); ++k) {
        if (nodes[k].sentence > nodes[cur].sentence &&
            shares(nodes[cur].tokens, nodes[k].tokens)) {
          next = k;
          break;
        }
      }
      if (next == nodes.size()) break;
      chain.push_back(next);
      cur = next;
    }
    if (chain.size() >= 2) chains.push_back(std::move(chain));
  }

  auto contained = [](const std::vector<std::size_t>& small,
                      const std::vector<std::size_t>& big) {
    if (small.size() >= big.size()) return false;
    return std::search(big.begin(), big.end(), small.begin(), small.end()) !=
           big.end();
  };
  std::vector<EventSequence> out;
  std::set<std::vector<std::size_t>> seen;
  for (std::size_t a = 0; a < chains.size(); ++a) {
    bool drop = seen.count(chains[a]) > 0;
    for (std::size_t b = 0; b < chains.size() && !drop; ++b) {
      if (a != b && contained(chains[a], chains[b])) drop = true;
    }
    if (drop) continue;
    seen.insert(chains[a]);
    EventSequence seq;
    seq.source_id = doc.id + ":" + std::to_string(out.size());
    for (auto idx : chains[a]) seq.events.push_back(*nodes[idx].event);
    out.push_back(std::move(seq));
  }
  return out;
}

std::set<std::string> load_stopwords(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kMissingFile, "cannot open " + path);
  std::set<std::string> out;
  std::string line;
  while (std::getline(in, line)) {
    const auto toks = split_ws(line);
    if (toks.empty() || toks[0][0] == '#') continue;
    std::string lower = toks[0];
    std::transform(lower.begin(), lower.end(), lower.begin(),
                   [](unsigned char c) { return std::tolower(c); });
    out.insert(lower);
  }
  return out;
}

nlohmann::ordered_json event_to_json(const Event& e) {
  nlohmann::ordered_json cs = nlohmann::ordered_json::array();
  for (const auto& c : e.constituents()) {
    nlohmann::ordered_json j;
    j["kind"] =
        c.kind == ConstituentKind::kPredicate ? "predicate" : "argument";
    j["role"] = c.role;
    j["text"] = c.text;
    cs.push_back(std::move(j));
  }
  nlohmann::ordered_json out;
  out["constituents"] = std::move(cs);
  return out;
}

Event event_from_json(const nlohmann::json& j, int sentence) {
  try {
    std::vector<Constituent> cs;
    for (const auto& c : j.at("constituents")) {
      const auto role = c.at("role").get<std::string>();
      // Without an explicit kind, the V role marks the predicate.
      const auto kind = c.contains("kind") ? c.at("kind").get<std::string>()
                                           : std::string(role == "V" ? "predicate" : "argument");
      if (kind != "predicate" && kind != "argument") {
        throw Error(ErrorCode::kParse, "unknown constituent kind: " + kind);
      }
      cs.push_back({kind == "predicate" ? ConstituentKind::kPredicate
                                        : ConstituentKind::kArgument,
                    role, c.at("text").get<std::string>()});
    }
    return Event(std::move(cs), sentence);
  } catch (const nlohmann::json::exception& ex) {
    throw Error(ErrorCode::kParse, std::string("bad event record: ") + ex.what());
  }
}

nlohmann::ordered_json sequence_to_json(const EventSequence& seq) {
  nlohmann::ordered_json out;
  out["id"] = seq.source_id;
  auto& evs = out["events"] = nlohmann::ordered_json::array();
  for (const auto& e : seq.events) evs.push_back(event_to_json(e));
  return out;
}

EventSequence sequence_from_json(const nlohmann::json& j) {
  EventSequence seq;
  seq.source_id = j.value("id", "");
  if (!j.contains("events")) {
    throw Error(ErrorCode::kParse, "sequence record lacks 'events'");
  }
  for (const auto& e : j.at("events")) seq.events.push_back(event_from_json(e));
  return seq;
}

SrlDocument document_from_json(const nlohmann::json& j) {
  SrlDocument doc;
  doc.id = j.value("id", "");
  if (!j.contains("sentences")) {
    throw Error(ErrorCode::kParse, "document record lacks 'sentences'");
  }
  int s = 0;
  for (const auto& sent : j.at("sentences")) {
    std::vector<Event> evs;
    for (const auto& e : sent) evs.push_back(event_from_json(e, s));
    doc.sentences.push_back(std::move(evs));
    ++s;
  }
  return doc;
}

std::vector<nlohmann::json> read_jsonl(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kMissingFile, "cannot open " + path);
  std::vector<nlohmann::json> out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      out.push_back(nlohmann::json::parse(line));
    } catch (const nlohmann::json::exception& ex) {
      throw Error(ErrorCode::kParse, path + ":" + std::to_string(lineno) +
                                         ": " + ex.what());
    }
  }
  return out;
}

void write_jsonl(const std::string& path,
                 const std::vector<nlohmann::ordered_json>& records) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::kIo, "cannot write " + path);
  for (const auto& r : records) out << r.dump() << '\n';
}

std::vector<EventSequence> load_sequences(
    const std::string& path, const std::set<std::string>& stopwords) {
  std::vector<EventSequence> out;
  for (const auto& rec : read_jsonl(path)) {
    if (rec.contains("sentences")) {
      for (auto& chain : extract_chains(document_from_json(rec), stopwords)) {
        out.push_back(std::move(chain));
      }
    } else {
      out.push_back(sequence_from_json(rec));
    }
  }
  return out;
}

}  // namespace tempo::events
