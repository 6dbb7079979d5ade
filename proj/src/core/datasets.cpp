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

#include "datasets.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <cstdio>
#include <fstream>
#include <functional>
#include <set>
#include <sstream>

#include "error.hpp"
#include "vocab.hpp"

namespace tempo::datasets {

using events::Event;
using events::EventSequence;

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::string lower(std::string s) {
  for (char& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return s;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kMissingFile, "cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream in(s);
  while (std::getline(in, cur, sep)) out.push_back(cur);
  if (!s.empty() && s.back() == sep) out.emplace_back();
  return out;
}

constexpr std::array<const char*, 12> kMonths = {
    "January", "February", "March",     "April",   "May",      "June",
    "July",    "August",   "September", "October", "November", "December"};
constexpr std::array<const char*, 7> kWeekdays = {
    "Monday", "Tuesday", "Wednesday", "Thursday", "Friday", "Saturday", "Sunday"};

struct Activity {
  const char* predicate;
  const char* object;
};

// Everyday events that carry no ordering signal of their own.
constexpr std::array<Activity, 24> kActivities = {{
    {"worked", "at the factory"},   {"ate", "dinner"},
    {"met", "an old friend"},       {"visited", "the museum"},
    {"bought", "a new car"},        {"moved", "to the city"},
    {"painted", "the house"},       {"read", "a long novel"},
    {"wrote", "a letter"},          {"planted", "a garden"},
    {"sold", "the farm"},           {"played", "the piano"},
    {"cleaned", "the kitchen"},     {"watched", "a film"},
    {"cooked", "a big meal"},       {"called", "the doctor"},
    {"repaired", "the roof"},       {"studied", "chemistry"},
    {"joined", "the choir"},        {"travelled", "to the coast"},
    {"opened", "a small shop"},     {"adopted", "a dog"},
    {"climbed", "the mountain"},    {"married", "a neighbor"},
}};

constexpr std::array<const char*, 8> kActors = {
    "he", "she", "the family", "my friend", "the teacher", "our neighbor",
    "the farmer", "the captain"};

}  // namespace

// ---- timex scenarios --------------------------------------------------

TimexKind parse_timex_kind(const std::string& name) {
  if (name == "year") return TimexKind::kYear;
  if (name == "month") return TimexKind::kMonth;
  if (name == "weekday") return TimexKind::kWeekday;
  if (name == "clock24") return TimexKind::kClock24;
  if (name == "clock12") return TimexKind::kClock12;
  throw Error(ErrorCode::kInvalidArgument, "unknown timex kind: " + name);
}

std::string timex_kind_name(TimexKind kind) {
  switch (kind) {
    case TimexKind::kYear: return "year";
    case TimexKind::kMonth: return "month";
    case TimexKind::kWeekday: return "weekday";
    case TimexKind::kClock24: return "clock24";
    case TimexKind::kClock12: return "clock12";
  }
  return "year";
}

void TimexSpec::validate() const {
  if (year_min < 1000 || year_max > 2100 || year_min > year_max) {
    throw Error(ErrorCode::kInvalidArgument, "year range must lie within [1000, 2100]");
  }
  if (!(window_prob >= 0.0 && window_prob <= 1.0) || window_width < 1) {
    throw Error(ErrorCode::kInvalidArgument, "bad year window settings");
  }
  if (excluded_years && excluded_years->first > excluded_years->second) {
    throw Error(ErrorCode::kInvalidArgument, "excluded year range is empty");
  }
}

Timex make_timex(TimexKind kind, int key) {
  char buf[32];
  switch (kind) {
    case TimexKind::kYear:
      return {"in " + std::to_string(key), key};
    case TimexKind::kMonth:
      return {std::string("in ") + kMonths.at(static_cast<std::size_t>(key)), key};
    case TimexKind::kWeekday:
      return {std::string("on ") + kWeekdays.at(static_cast<std::size_t>(key)), key};
    case TimexKind::kClock24:
      std::snprintf(buf, sizeof buf, "at %d:%02d", key / 60, key % 60);
      return {buf, key};
    case TimexKind::kClock12: {
      const int h = key / 60;
      const int h12 = h % 12 == 0 ? 12 : h % 12;
      std::snprintf(buf, sizeof buf, "at %d:%02d %s", h12, key % 60, h < 12 ? "am" : "pm");
      return {buf, key};
    }
  }
  return {"", key};
}

namespace {

int domain_size(TimexKind kind) {
  switch (kind) {
    case TimexKind::kMonth: return 12;
    case TimexKind::kWeekday: return 7;
    case TimexKind::kClock24:
    case TimexKind::kClock12: return 24 * 60;
    case TimexKind::kYear: break;
  }
  return 0;
}

bool year_allowed(const TimexSpec& spec, int y) {
  if (y < spec.year_min || y > spec.year_max) return false;
  return !(spec.excluded_years && y >= spec.excluded_years->first &&
           y <= spec.excluded_years->second);
}

std::vector<int> draw_keys(const TimexSpec& spec, int count, Rng& rng) {
  std::set<int> keys;
  if (spec.kind != TimexKind::kYear) {
    if (count > domain_size(spec.kind)) {
      throw Error(ErrorCode::kInvalidArgument, "not enough distinct timex values");
    }
    while (static_cast<int>(keys.size()) < count) {
      keys.insert(static_cast<int>(rng.below(static_cast<std::uint64_t>(domain_size(spec.kind)))));
    }
    return {keys.begin(), keys.end()};
  }

  int lo = spec.year_min, hi = spec.year_max;
  if (spec.window_prob > 0.0 && rng.bernoulli(spec.window_prob) &&
      spec.window_width < spec.year_max - spec.year_min) {
    for (int attempt = 0; attempt < 64; ++attempt) {
      const int start = spec.year_min + static_cast<int>(rng.below(
          static_cast<std::uint64_t>(spec.year_max - spec.year_min - spec.window_width + 1)));
      int allowed = 0;
      for (int y = start; y <= start + spec.window_width; ++y) allowed += year_allowed(spec, y);
      if (allowed >= count) {
        lo = start;
        hi = start + spec.window_width;
        break;
      }
    }
  }
  int allowed = 0;
  for (int y = lo; y <= hi; ++y) allowed += year_allowed(spec, y);
  if (allowed < count) throw Error(ErrorCode::kInvalidArgument, "not enough distinct years");
  while (static_cast<int>(keys.size()) < count) {
    const int y = lo + static_cast<int>(rng.below(static_cast<std::uint64_t>(hi - lo + 1)));
    if (year_allowed(spec, y)) keys.insert(y);
  }
  return {keys.begin(), keys.end()};
}

}  // namespace

std::vector<EventSequence> gen_timex_corpus(const TimexSpec& spec,
                                            int n_sequences, int events_per_seq,
                                            std::uint64_t seed) {
  spec.validate();
  if (n_sequences < 0 || events_per_seq < 1 ||
      events_per_seq > static_cast<int>(kActivities.size())) {
    throw Error(ErrorCode::kInvalidArgument, "bad timex corpus size");
  }
  std::vector<EventSequence> out;
  out.reserve(static_cast<std::size_t>(n_sequences));
  for (int s = 0; s < n_sequences; ++s) {
    Rng rng(derive_seed(seed, static_cast<std::uint64_t>(s)));
    const auto keys = draw_keys(spec, events_per_seq, rng);  // ascending
    std::vector<std::size_t> acts(kActivities.size());
    for (std::size_t i = 0; i < acts.size(); ++i) acts[i] = i;
    rng.shuffle(acts);
    const char* actor = kActors[rng.below(kActors.size())];
    EventSequence seq;
    seq.source_id = "timex-" + timex_kind_name(spec.kind) + "-" + std::to_string(s);
    for (int e = 0; e < events_per_seq; ++e) {
      const auto& a = kActivities[acts[static_cast<std::size_t>(e)]];
      seq.events.push_back(Event::from_roles({{"ARG0", actor},
                                              {"V", a.predicate},
                                              {"ARG1", a.object},
                                              {"ARGM-TMP", make_timex(spec.kind, keys[static_cast<std::size_t>(e)]).text}}));
    }
    out.push_back(std::move(seq));
  }
  return out;
}

std::optional<int> timex_key(TimexKind kind, const Event& e) {
  for (const auto& c : e.constituents()) {
    if (c.role != "ARGM-TMP") continue;
    const std::string& t = c.text;
    const auto sp = t.find(' ');
    if (sp == std::string::npos) return std::nullopt;
    const std::string body = t.substr(sp + 1);
    try {
      switch (kind) {
        case TimexKind::kYear:
          return std::stoi(body);
        case TimexKind::kMonth:
          for (std::size_t i = 0; i < kMonths.size(); ++i) {
            if (body == kMonths[i]) return static_cast<int>(i);
          }
          return std::nullopt;
        case TimexKind::kWeekday:
          for (std::size_t i = 0; i < kWeekdays.size(); ++i) {
            if (body == kWeekdays[i]) return static_cast<int>(i);
          }
          return std::nullopt;
        case TimexKind::kClock24:
        case TimexKind::kClock12: {
          const auto colon = body.find(':');
          if (colon == std::string::npos) return std::nullopt;
          int h = std::stoi(body.substr(0, colon));
          const int m = std::stoi(body.substr(colon + 1, 2));
          if (kind == TimexKind::kClock12) {
            const bool pm = body.find("pm") != std::string::npos;
            h = h % 12 + (pm ? 12 : 0);
          }
          return h * 60 + m;
        }
      }
    } catch (const std::exception&) {
      return std::nullopt;
    }
  }
  return std::nullopt;
}

// ---- narrative schemas ------------------------------------------------

namespace {

std::vector<std::string> slots_in(const std::string& text) {
  std::vector<std::string> out;
  std::size_t pos = 0;
  while ((pos = text.find('{', pos)) != std::string::npos) {
    const auto end = text.find('}', pos);
    if (end == std::string::npos) break;
    out.push_back(text.substr(pos + 1, end - pos - 1));
    pos = end + 1;
  }
  return out;
}

void validate_schema(const ScenarioSchema& s) {
  auto fail = [&](const std::string& why) {
    throw Error(ErrorCode::kParse, "schema '" + s.name + "': " + why);
  };
  if (s.steps.size() < 3) fail("needs at least 3 steps");
  for (std::size_t i = 0; i < s.steps.size(); ++i) {
    int predicates = 0;
    for (const auto& [role, text] : s.steps[i].roles) predicates += role == "V";
    if (predicates != 1) fail("step " + std::to_string(i + 1) + " needs exactly one V");
    for (const auto& slot : s.slots_of(i)) {
      auto it = s.fillers.find(slot);
      if (it == s.fillers.end() || it->second.empty()) fail("slot {" + slot + "} has no fillers");
    }
    if (i == 0) continue;
    const auto a = s.slots_of(i - 1), b = s.slots_of(i);
    const bool shared = std::any_of(a.begin(), a.end(), [&](const std::string& x) {
      return std::find(b.begin(), b.end(), x) != b.end();
    });
    if (!shared) fail("steps " + std::to_string(i) + " and " + std::to_string(i + 1) + " share no slot");
  }
}

}  // namespace

std::vector<std::string> ScenarioSchema::slots_of(std::size_t step) const {
  std::vector<std::string> out;
  for (const auto& [role, text] : steps.at(step).roles) {
    for (auto& s : slots_in(text)) {
      if (std::find(out.begin(), out.end(), s) == out.end()) out.push_back(s);
    }
  }
  return out;
}

std::vector<ScenarioSchema> parse_schemas(const std::string& text) {
  std::vector<ScenarioSchema> out;
  std::optional<ScenarioSchema> cur;
  int line_no = 0;
  std::istringstream in(text);
  std::string line;
  auto fail = [&](const std::string& why) {
    throw Error(ErrorCode::kParse, "schemas line " + std::to_string(line_no) + ": " + why);
  };
  while (std::getline(in, line)) {
    ++line_no;
    line = trim(line);
    if (line.empty() || line[0] == '#') continue;
    const auto sp = line.find(' ');
    const std::string head = line.substr(0, sp);
    const std::string rest = sp == std::string::npos ? "" : trim(line.substr(sp + 1));
    if (head == "schema") {
      if (cur) fail("schema '" + cur->name + "' is missing 'end'");
      if (rest.empty()) fail("schema needs a name");
      cur = ScenarioSchema{rest, {}, {}};
    } else if (head == "end") {
      if (!cur) fail("'end' without 'schema'");
      validate_schema(*cur);
      out.push_back(std::move(*cur));
      cur.reset();
    } else if (!cur) {
      fail("'" + head + "' outside a schema block");
    } else if (head == "slot") {
      const auto eq = rest.find('=');
      if (eq == std::string::npos) fail("slot needs '='");
      auto& fill = cur->fillers[trim(rest.substr(0, eq))];
      for (const auto& f : split(rest.substr(eq + 1), '|')) {
        if (!trim(f).empty()) fill.push_back(trim(f));
      }
    } else if (head == "step") {
      StepTemplate st;
      for (const auto& part : split(rest, ';')) {
        const auto eq = part.find('=');
        if (eq == std::string::npos) fail("step parts look like ROLE=text");
        st.roles.emplace_back(trim(part.substr(0, eq)), trim(part.substr(eq + 1)));
      }
      cur->steps.push_back(std::move(st));
    } else {
      fail("unknown directive '" + head + "'");
    }
  }
  if (cur) throw Error(ErrorCode::kParse, "schema '" + cur->name + "' is missing 'end'");
  return out;
}

std::vector<ScenarioSchema> load_schemas(const std::string& path) {
  return parse_schemas(read_file(path));
}

EventSequence instantiate_schema(const ScenarioSchema& schema, Rng& rng) {
  std::map<std::string, std::string> fill;
  for (const auto& [slot, options] : schema.fillers) {
    fill[slot] = options[rng.below(options.size())];
  }
  EventSequence seq;
  for (const auto& step : schema.steps) {
    std::vector<std::pair<std::string, std::string>> roles;
    for (const auto& [role, tmpl] : step.roles) {
      std::string text;
      std::size_t pos = 0;
      while (pos < tmpl.size()) {
        const auto open = tmpl.find('{', pos);
        if (open == std::string::npos) {
          text += tmpl.substr(pos);
          break;
        }
        const auto close = tmpl.find('}', open);
        text += tmpl.substr(pos, open - pos);
        text += fill.at(tmpl.substr(open + 1, close - open - 1));
        pos = close + 1;
      }
      roles.emplace_back(role, text);
    }
    seq.events.push_back(Event::from_roles(roles));
  }
  return seq;
}

std::vector<EventSequence> gen_schema_corpus(const std::vector<ScenarioSchema>& schemas,
                                             int n, std::uint64_t seed,
                                             const SchemaSampling& sampling) {
  if (schemas.empty()) throw Error(ErrorCode::kInvalidArgument, "no schemas loaded");
  if (!(sampling.drop_prob >= 0.0 && sampling.drop_prob <= 1.0)) {
    throw Error(ErrorCode::kInvalidArgument, "drop_prob must lie in [0, 1]");
  }
  std::vector<EventSequence> out;
  out.reserve(static_cast<std::size_t>(std::max(n, 0)));
  for (int i = 0; i < n; ++i) {
    Rng rng(derive_seed(seed, static_cast<std::uint64_t>(i)));
    const auto& schema = schemas[rng.below(schemas.size())];
    EventSequence full = instantiate_schema(schema, rng);
    EventSequence seq;
    seq.source_id = schema.name + "-" + std::to_string(i);
    std::size_t remaining = full.events.size();
    bool prev_dropped = false;
    for (std::size_t s = 0; s < full.events.size(); ++s) {
      const bool drop = !prev_dropped && remaining > 3 && sampling.drop_prob > 0.0 &&
                        rng.bernoulli(sampling.drop_prob);
      prev_dropped = drop;
      if (drop) {
        --remaining;
        continue;
      }
      seq.events.push_back(full.events[s]);
    }
    out.push_back(std::move(seq));
  }
  return out;
}

// ---- relation graphs --------------------------------------------------

bool is_excluded_relation(const std::string& label) {
  std::string up = label;
  for (char& c : up) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
  return up == "IDENTITY" || up == "DURING" || up == "CAUSE_TO_END";
}

std::vector<std::vector<int>> dag_paths(int n_nodes, const std::vector<Relation>& relations) {
  std::vector<std::set<int>> succ(static_cast<std::size_t>(n_nodes));
  std::vector<int> indegree(static_cast<std::size_t>(n_nodes), 0);
  for (const auto& r : relations) {
    if (r.from < 0 || r.to < 0 || r.from >= n_nodes || r.to >= n_nodes) {
      throw Error(ErrorCode::kInvalidArgument, "relation refers to a missing event");
    }
    if (is_excluded_relation(r.label)) continue;
    if (succ[static_cast<std::size_t>(r.from)].insert(r.to).second) {
      ++indegree[static_cast<std::size_t>(r.to)];
    }
  }

  // 0 = unvisited, 1 = on the stack, 2 = done.
  std::vector<int> color(static_cast<std::size_t>(n_nodes), 0);
  std::vector<int> stack;
  std::function<void(int)> visit = [&](int u) {
    color[static_cast<std::size_t>(u)] = 1;
    stack.push_back(u);
    for (int v : succ[static_cast<std::size_t>(u)]) {
      if (color[static_cast<std::size_t>(v)] == 1) {
        std::string cycle;
        auto it = std::find(stack.begin(), stack.end(), v);
        for (; it != stack.end(); ++it) cycle += std::to_string(*it) + " -> ";
        throw Error(ErrorCode::kCycle, "relation graph has a cycle: " + cycle + std::to_string(v));
      }
      if (color[static_cast<std::size_t>(v)] == 0) visit(v);
    }
    stack.pop_back();
    color[static_cast<std::size_t>(u)] = 2;
  };
  for (int u = 0; u < n_nodes; ++u) {
    if (color[static_cast<std::size_t>(u)] == 0) visit(u);
  }

  constexpr std::size_t kMaxPaths = 100000;
  std::vector<std::vector<int>> paths;
  std::vector<int> path;
  std::function<void(int)> walk = [&](int u) {
    path.push_back(u);
    const auto& next = succ[static_cast<std::size_t>(u)];
    if (next.empty()) {
      if (path.size() >= 2) {
        if (paths.size() == kMaxPaths) {
          throw Error(ErrorCode::kSizeLimit, "relation graph has too many paths");
        }
        paths.push_back(path);
      }
    } else {
      for (int v : next) walk(v);
    }
    path.pop_back();
  };
  for (int u = 0; u < n_nodes; ++u) {
    if (indegree[static_cast<std::size_t>(u)] == 0) walk(u);
  }
  return paths;
}

std::vector<EventSequence> dag_to_sequences(const std::vector<Event>& events,
                                            const std::vector<Relation>& relations,
                                            const std::string& source_id) {
  std::vector<EventSequence> out;
  const auto paths = dag_paths(static_cast<int>(events.size()), relations);
  for (std::size_t p = 0; p < paths.size(); ++p) {
    EventSequence seq;
    for (int i : paths[p]) seq.events.push_back(events[static_cast<std::size_t>(i)]);
    seq.source_id = (source_id.empty() ? "dag" : source_id) + ":" + std::to_string(p);
    out.push_back(std::move(seq));
  }
  return out;
}

// ---- question templates -----------------------------------------------

std::string relation_name(TemporalRelation r) {
  return r == TemporalRelation::kBefore ? "before" : "after";
}

TemporalRelation parse_relation(const std::string& name) {
  const std::string n = lower(trim(name));
  if (n == "before") return TemporalRelation::kBefore;
  if (n == "after") return TemporalRelation::kAfter;
  throw Error(ErrorCode::kParse, "relation must be before or after, got '" + name + "'");
}

std::vector<QuestionTemplate> parse_templates(const std::string& text) {
  std::vector<QuestionTemplate> out;
  std::istringstream in(text);
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (trim(line).empty() || trim(line)[0] == '#') continue;
    const auto tab = line.find('\t');
    if (tab == std::string::npos) {
      throw Error(ErrorCode::kParse,
                  "template line " + std::to_string(line_no) + " needs a tab after the relation");
    }
    QuestionTemplate t{parse_relation(line.substr(0, tab)), line.substr(tab + 1), {}};
    try {
      t.regex = std::regex(t.pattern, std::regex::ECMAScript | std::regex::icase);
    } catch (const std::regex_error& e) {
      throw Error(ErrorCode::kParse,
                  "template line " + std::to_string(line_no) + ": " + e.what());
    }
    if (t.regex.mark_count() < 1) {
      throw Error(ErrorCode::kParse,
                  "template line " + std::to_string(line_no) + " has no capture group");
    }
    out.push_back(std::move(t));
  }
  return out;
}

std::vector<QuestionTemplate> load_templates(const std::string& path) {
  return parse_templates(read_file(path));
}

std::optional<QuestionParse> parse_mctaco_question(
    const std::string& question, const std::vector<QuestionTemplate>& templates) {
  const std::string q = trim(question);
  std::smatch m;
  for (std::size_t i = 0; i < templates.size(); ++i) {
    if (!std::regex_match(q, m, templates[i].regex)) continue;
    std::string ev = trim(m[1].str());
    while (!ev.empty() && (ev.back() == '?' || ev.back() == '.')) ev.pop_back();
    ev = trim(ev);
    if (ev.empty()) continue;
    return QuestionParse{templates[i].relation, ev, static_cast<int>(i)};
  }
  return std::nullopt;
}

std::vector<std::string> rouge_tokens(const std::string& text) {
  std::vector<std::string> out;
  for (auto& t : text::tokenize(lower(text), false)) {
    if (t.size() == 1 && std::ispunct(static_cast<unsigned char>(t[0]))) continue;
    out.push_back(std::move(t));
  }
  return out;
}

double rouge_l(const std::vector<std::string>& candidate,
               const std::vector<std::string>& reference) {
  if (candidate.empty() || reference.empty()) return 0.0;
  std::vector<int> prev(reference.size() + 1, 0), cur(reference.size() + 1, 0);
  for (std::size_t i = 1; i <= candidate.size(); ++i) {
    for (std::size_t j = 1; j <= reference.size(); ++j) {
      cur[j] = lower(candidate[i - 1]) == lower(reference[j - 1])
                   ? prev[j - 1] + 1
                   : std::max(prev[j], cur[j - 1]);
    }
    std::swap(prev, cur);
  }
  const double lcs = prev[reference.size()];
  if (lcs == 0) return 0.0;
  const double p = lcs / static_cast<double>(candidate.size());
  const double r = lcs / static_cast<double>(reference.size());
  return 2.0 * p * r / (p + r);
}

EventMatch match_question_event(const std::string& event_text,
                                const std::vector<Event>& candidates) {
  if (candidates.empty()) {
    throw Error(ErrorCode::kInvalidArgument, "no candidate events to match");
  }
  const auto query = rouge_tokens(event_text);
  EventMatch best;
  best.score = -1.0;
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    const double s = rouge_l(query, rouge_tokens(events::render_event(candidates[i])));
    if (s > best.score) {
      best.score = s;
      best.index = static_cast<int>(i);
    }
  }
  best.low_confidence = best.score <= 0.0;
  return best;
}

McTacoExample mctaco_from_json(const nlohmann::json& j) {
  try {
    std::vector<Event> context;
    for (const auto& e : j.at("context_events")) context.push_back(events::event_from_json(e));
    McTacoExample ex{std::move(context), j.at("question").get<std::string>(),
                     events::event_from_json(j.at("answer_event")), std::nullopt,
                     std::nullopt};
    if (j.contains("gold_relation")) {
      ex.gold_relation = parse_relation(j.at("gold_relation").get<std::string>());
    }
    if (j.contains("gold_event_text")) {
      ex.gold_event_text = j.at("gold_event_text").get<std::string>();
    }
    return ex;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kParse, std::string("question example: ") + e.what());
  }
}

std::vector<McTacoExample> load_mctaco(const std::string& path) {
  std::vector<McTacoExample> out;
  for (const auto& j : events::read_jsonl(path)) out.push_back(mctaco_from_json(j));
  return out;
}

}  // namespace tempo::datasets
