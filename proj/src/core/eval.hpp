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

#ifndef TEMPO_CORE_EVAL_HPP_
#define TEMPO_CORE_EVAL_HPP_

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "corruption.hpp"
#include "datasets.hpp"
#include "events.hpp"
#include "json.hpp"

namespace tempo::eval {

// Orders are "rank -> input index" permutations throughout.
double pairwise_accuracy(const std::vector<int>& gold, const std::vector<int>& pred);

struct RankHit {
  bool top1 = false;
  bool topk = false;
};

RankHit ranking_em(int gold_position, const std::vector<int>& ranked, int k = 2);

struct BeforeAfterOutcome {
  datasets::TemporalRelation predicted;
  bool correct = false;
};

BeforeAfterOutcome before_after_eval(const std::vector<int>& pred, int q_index,
                                     int a_index, datasets::TemporalRelation gold);

// F1 with zero denominators read as 0.
double f1_score(int true_pos, int false_pos, int false_neg);

struct ClassificationMetrics {
  double accuracy = 0.0;
  double f1_before = 0.0;
  double f1_after = 0.0;
  double macro_f1 = 0.0;
  int n = 0;
};

ClassificationMetrics classification_metrics(
    const std::vector<datasets::TemporalRelation>& predicted,
    const std::vector<datasets::TemporalRelation>& gold);

struct MetricsReport {
  std::string task;
  int n_examples = 0;
  int n_errors = 0;
  std::optional<double> pairwise_accuracy;
  std::optional<double> exact_match;
  std::optional<double> top2_exact_match;
  std::optional<ClassificationMetrics> classification;
  // Examples with at least three events.
  std::optional<int> n_long;
  std::optional<double> pairwise_accuracy_long;
  std::optional<double> exact_match_long;
  nlohmann::ordered_json details = nlohmann::ordered_json::object();

  nlohmann::ordered_json to_json() const;
};

void write_report(const std::string& path, const MetricsReport& report);

using Orderer = std::function<std::vector<int>(const std::vector<events::Event>&)>;

struct OrderingEvaluation {
  MetricsReport report;
  std::vector<std::optional<std::vector<int>>> predictions;
};

OrderingEvaluation evaluate_ordering(const Orderer& orderer,
                                     const std::vector<corruption::OrderingExample>& eval_set,
                                     const std::string& task = "ordering");

struct InsertionCase {
  std::vector<events::Event> seed_events;
  events::Event new_event;
  int gold_position = 0;
};

// Removes one interior-or-edge event per sequence (position drawn per item).
std::vector<InsertionCase> make_insertion_cases(
    const std::vector<events::EventSequence>& sequences, std::uint64_t seed);

using InsertionRanker = std::function<std::vector<int>(const InsertionCase&)>;

struct InsertionEvaluation {
  MetricsReport report;
  std::vector<std::vector<int>> rankings;
};

InsertionEvaluation evaluate_insertion(const InsertionRanker& ranker,
                                       const std::vector<InsertionCase>& cases);

struct BeforeAfterEvaluation {
  MetricsReport report;
  nlohmann::ordered_json predictions = nlohmann::ordered_json::array();
};

// Answer event is appended after the context; the ordering decides whether
// it lands before or after the matched question event.
BeforeAfterEvaluation evaluate_before_after(
    const Orderer& orderer, const std::vector<datasets::McTacoExample>& examples,
    const std::vector<datasets::QuestionTemplate>& templates);

struct TemplateAccuracy {
  int n = 0;
  int parsed = 0;
  int correct = 0;
  double accuracy() const { return n ? static_cast<double>(correct) / n : 0.0; }
};

// Compares template parses with the hand labels on every labeled example.
TemplateAccuracy template_accuracy(const std::vector<datasets::McTacoExample>& examples,
                                   const std::vector<datasets::QuestionTemplate>& templates);

struct ScalingPoint {
  int n_sequences = 0;
  double pairwise_accuracy = 0.0;
  double exact_match = 0.0;
  double insertion_em = 0.0;
  double final_loss = 0.0;
};

std::string scaling_csv(const std::vector<ScalingPoint>& points);

}  // namespace tempo::eval

#endif  // TEMPO_CORE_EVAL_HPP_
