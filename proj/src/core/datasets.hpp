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

#ifndef TEMPO_CORE_DATASETS_HPP_
#define TEMPO_CORE_DATASETS_HPP_

#include <cstdint>
#include <map>
#include <optional>
#include <regex>
#include <string>
#include <tuple>
#include <vector>

#include "events.hpp"
#include "json.hpp"
#include "rng.hpp"

namespace tempo::datasets {

// ---- timex scenarios --------------------------------------------------

enum class TimexKind { kYear, kMonth, kWeekday, kClock24, kClock12 };

TimexKind parse_timex_kind(const std::string& name);
std::string timex_kind_name(TimexKind kind);

struct TimexSpec {
  TimexKind kind = TimexKind::kYear;
  int year_min = 1000;
  int year_max = 2100;
  // Years in [excluded_min, excluded_max] are never drawn (when set).
  std::optional<std::pair<int, int>> excluded_years;
  // With this probability a sequence draws all of its years from one window
  // of `window_width` years instead of the whole range.
  double window_prob = 0.0;
  int window_width = 60;

  void validate() const;
};

// A sampled temporal expression; `key` sorts chronologically within a kind.
struct Timex {
  std::string text;  // with preposition, e.g. "in 1999", "at 2:30 pm"
  int key = 0;
};

Timex make_timex(TimexKind kind, int key);

// Sequences in chronological order, each event carrying its own timex.
std::vector<events::EventSequence> gen_timex_corpus(const TimexSpec& spec,
                                                    int n_sequences,
                                                    int events_per_seq,
                                                    std::uint64_t seed);

// Recovers the chronological key from an event built by gen_timex_corpus.
std::optional<int> timex_key(TimexKind kind, const events::Event& e);

// ---- narrative schemas ------------------------------------------------

struct StepTemplate {
  std::vector<std::pair<std::string, std::string>> roles;  // role -> text with {slot}
};

struct ScenarioSchema {
  std::string name;
  std::vector<StepTemplate> steps;
  std::map<std::string, std::vector<std::string>> fillers;

  // Slot names referenced by step i.
  std::vector<std::string> slots_of(std::size_t step) const;
};

// Plain-text schema library; see data/schemas.txt for the format.
std::vector<ScenarioSchema> parse_schemas(const std::string& text);
std::vector<ScenarioSchema> load_schemas(const std::string& path);

struct SchemaSampling {
  // Probability of dropping a step; dropped steps are never adjacent and at
  // least three steps survive.
  double drop_prob = 0.0;
};

std::vector<events::EventSequence> gen_schema_corpus(
    const std::vector<ScenarioSchema>& schemas, int n, std::uint64_t seed,
    const SchemaSampling& sampling = {});

// Fills every step of one schema with a single slot assignment.
events::EventSequence instantiate_schema(const ScenarioSchema& schema, Rng& rng);

// ---- relation graphs --------------------------------------------------

struct Relation {
  int from = 0;
  int to = 0;
  std::string label;
};

// Labels that carry no ordering and are dropped.
bool is_excluded_relation(const std::string& label);

std::vector<events::EventSequence> dag_to_sequences(
    const std::vector<events::Event>& events,
    const std::vector<Relation>& relations, const std::string& source_id = "");

// Same search on bare indices; every path is a list of node ids.
std::vector<std::vector<int>> dag_paths(int n_nodes,
                                        const std::vector<Relation>& relations);

// ---- question templates -----------------------------------------------

enum class TemporalRelation { kBefore, kAfter };

std::string relation_name(TemporalRelation r);
TemporalRelation parse_relation(const std::string& name);

struct QuestionTemplate {
  TemporalRelation relation;
  std::string pattern;
  std::regex regex;
};

// One template per line: "<before|after><TAB><regex with one capture group>".
std::vector<QuestionTemplate> parse_templates(const std::string& text);
std::vector<QuestionTemplate> load_templates(const std::string& path);

struct QuestionParse {
  TemporalRelation relation;
  std::string event_text;
  int template_index = 0;
};

std::optional<QuestionParse> parse_mctaco_question(
    const std::string& question, const std::vector<QuestionTemplate>& templates);

double rouge_l(const std::vector<std::string>& candidate,
               const std::vector<std::string>& reference);

// Lowercased tokens used for ROUGE-L matching.
std::vector<std::string> rouge_tokens(const std::string& text);

struct EventMatch {
  int index = 0;
  double score = 0.0;
  bool low_confidence = false;  // every candidate scored 0
};

EventMatch match_question_event(const std::string& event_text,
                                const std::vector<events::Event>& candidates);

struct McTacoExample {
  std::vector<events::Event> context_events;
  std::string question;
  events::Event answer_event;
  std::optional<TemporalRelation> gold_relation;
  std::optional<std::string> gold_event_text;
};

McTacoExample mctaco_from_json(const nlohmann::json& j);
std::vector<McTacoExample> load_mctaco(const std::string& path);

}  // namespace tempo::datasets

#endif  // TEMPO_CORE_DATASETS_HPP_
