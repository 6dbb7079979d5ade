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

#include "eval.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "error.hpp"

namespace tempo::eval {

using datasets::TemporalRelation;
using events::Event;

namespace {

std::vector<int> ranks_of(const std::vector<int>& order) {
  std::vector<int> rank(order.size(), -1);
  for (std::size_t r = 0; r < order.size(); ++r) {
    const int i = order[r];
    if (i < 0 || static_cast<std::size_t>(i) >= order.size() ||
        rank[static_cast<std::size_t>(i)] != -1) {
      throw Error(ErrorCode::kShapeMismatch, "order is not a permutation of 0..n-1");
    }
    rank[static_cast<std::size_t>(i)] = static_cast<int>(r);
  }
  return rank;
}

double mean(double sum, int n) { return n > 0 ? sum / n : 0.0; }

}  // namespace

double pairwise_accuracy(const std::vector<int>& gold, const std::vector<int>& pred) {
  if (gold.size() != pred.size()) {
    throw Error(ErrorCode::kShapeMismatch, "gold and predicted orders differ in length");
  }
  if (gold.size() < 2) {
    throw Error(ErrorCode::kInvalidArgument, "pairwise accuracy needs at least 2 events");
  }
  const auto rg = ranks_of(gold);
  const auto rp = ranks_of(pred);
  std::size_t agree = 0, total = 0;
  for (std::size_t i = 0; i < gold.size(); ++i) {
    for (std::size_t j = i + 1; j < gold.size(); ++j) {
      agree += (rg[i] < rg[j]) == (rp[i] < rp[j]);
      ++total;
    }
  }
  return static_cast<double>(agree) / static_cast<double>(total);
}

RankHit ranking_em(int gold_position, const std::vector<int>& ranked, int k) {
  const auto it = std::find(ranked.begin(), ranked.end(), gold_position);
  if (it == ranked.end()) {
    throw Error(ErrorCode::kInvalidArgument, "gold position missing from the ranking");
  }
  const auto rank = it - ranked.begin();
  return {rank == 0, rank < k};
}

BeforeAfterOutcome before_after_eval(const std::vector<int>& pred, int q_index,
                                     int a_index, TemporalRelation gold) {
  const auto rank = ranks_of(pred);
  if (q_index < 0 || a_index < 0 || static_cast<std::size_t>(q_index) >= rank.size() ||
      static_cast<std::size_t>(a_index) >= rank.size()) {
    throw Error(ErrorCode::kInvalidArgument, "question or answer index outside the order");
  }
  const TemporalRelation predicted =
      rank[static_cast<std::size_t>(a_index)] < rank[static_cast<std::size_t>(q_index)]
          ? TemporalRelation::kBefore
          : TemporalRelation::kAfter;
  return {predicted, predicted == gold};
}

double f1_score(int true_pos, int false_pos, int false_neg) {
  const int pd = true_pos + false_pos;
  const int rd = true_pos + false_neg;
  if (pd == 0 || rd == 0) return 0.0;
  const double p = static_cast<double>(true_pos) / pd;
  const double r = static_cast<double>(true_pos) / rd;
  return p + r > 0.0 ? 2.0 * p * r / (p + r) : 0.0;
}

ClassificationMetrics classification_metrics(const std::vector<TemporalRelation>& predicted,
                                             const std::vector<TemporalRelation>& gold) {
  if (predicted.size() != gold.size()) {
    throw Error(ErrorCode::kShapeMismatch, "prediction and gold counts differ");
  }
  ClassificationMetrics m;
  m.n = static_cast<int>(gold.size());
  int correct = 0;
  auto f1_for = [&](TemporalRelation cls) {
    int tp = 0, fp = 0, fn = 0;
    for (std::size_t i = 0; i < gold.size(); ++i) {
      const bool p = predicted[i] == cls, g = gold[i] == cls;
      tp += p && g;
      fp += p && !g;
      fn += !p && g;
    }
    return f1_score(tp, fp, fn);
  };
  for (std::size_t i = 0; i < gold.size(); ++i) correct += predicted[i] == gold[i];
  m.accuracy = mean(correct, m.n);
  m.f1_before = f1_for(TemporalRelation::kBefore);
  m.f1_after = f1_for(TemporalRelation::kAfter);
  m.macro_f1 = 0.5 * (m.f1_before + m.f1_after);
  return m;
}

nlohmann::ordered_json MetricsReport::to_json() const {
  nlohmann::ordered_json j;
  j["task"] = task;
  j["n_examples"] = n_examples;
  j["n_errors"] = n_errors;
  if (pairwise_accuracy) j["pairwise_accuracy"] = *pairwise_accuracy;
  if (exact_match) j["exact_match"] = *exact_match;
  if (top2_exact_match) j["top2_exact_match"] = *top2_exact_match;
  if (classification) {
    j["accuracy"] = classification->accuracy;
    j["f1_before"] = classification->f1_before;
    j["f1_after"] = classification->f1_after;
    j["macro_f1"] = classification->macro_f1;
  }
  if (n_long) {
    nlohmann::ordered_json b;
    b["n_examples"] = *n_long;
    if (pairwise_accuracy_long) b["pairwise_accuracy"] = *pairwise_accuracy_long;
    if (exact_match_long) b["exact_match"] = *exact_match_long;
    j["length_at_least_3"] = b;
  }
  if (!details.empty()) j["details"] = details;
  return j;
}

void write_report(const std::string& path, const MetricsReport& report) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::kIo, "cannot write " + path);
  out << report.to_json().dump(2) << "\n";
}

OrderingEvaluation evaluate_ordering(const Orderer& orderer,
                                     const std::vector<corruption::OrderingExample>& eval_set,
                                     const std::string& task) {
  OrderingEvaluation ev;
  ev.report.task = task;
  ev.report.n_examples = static_cast<int>(eval_set.size());
  double pa = 0, em = 0, pa_long = 0, em_long = 0;
  int scored = 0, n_long = 0;
  for (const auto& ex : eval_set) {
    std::vector<int> pred;
    try {
      pred = orderer(ex.events);
      const double acc = pairwise_accuracy(ex.gold, pred);
      const double hit = pred == ex.gold ? 1.0 : 0.0;
      pa += acc;
      em += hit;
      ++scored;
      if (ex.events.size() >= 3) {
        pa_long += acc;
        em_long += hit;
        ++n_long;
      }
      ev.predictions.emplace_back(std::move(pred));
    } catch (const Error&) {
      ++ev.report.n_errors;
      ev.predictions.emplace_back(std::nullopt);
    }
  }
  ev.report.pairwise_accuracy = mean(pa, scored);
  ev.report.exact_match = mean(em, scored);
  ev.report.n_long = n_long;
  ev.report.pairwise_accuracy_long = mean(pa_long, n_long);
  ev.report.exact_match_long = mean(em_long, n_long);
  return ev;
}

std::vector<InsertionCase> make_insertion_cases(const std::vector<events::EventSequence>& sequences,
                                                std::uint64_t seed) {
  std::vector<InsertionCase> out;
  for (std::size_t s = 0; s < sequences.size(); ++s) {
    const auto& evs = sequences[s].events;
    if (evs.size() < 2) continue;
    Rng rng(derive_seed(seed, s));
    const auto pos = rng.below(evs.size());
    std::vector<Event> seeds;
    for (std::size_t i = 0; i < evs.size(); ++i) {
      if (i != pos) seeds.push_back(evs[i]);
    }
    out.push_back({std::move(seeds), evs[pos], static_cast<int>(pos)});
  }
  return out;
}

InsertionEvaluation evaluate_insertion(const InsertionRanker& ranker,
                                       const std::vector<InsertionCase>& cases) {
  InsertionEvaluation ev;
  ev.report.task = "insertion";
  ev.report.n_examples = static_cast<int>(cases.size());
  double top1 = 0, top2 = 0;
  int scored = 0;
  for (const auto& c : cases) {
    try {
      auto ranked = ranker(c);
      const RankHit hit = ranking_em(c.gold_position, ranked, 2);
      top1 += hit.top1;
      top2 += hit.topk;
      ++scored;
      ev.rankings.push_back(std::move(ranked));
    } catch (const Error&) {
      ++ev.report.n_errors;
      ev.rankings.emplace_back();
    }
  }
  ev.report.exact_match = mean(top1, scored);
  ev.report.top2_exact_match = mean(top2, scored);
  return ev;
}

BeforeAfterEvaluation evaluate_before_after(
    const Orderer& orderer, const std::vector<datasets::McTacoExample>& examples,
    const std::vector<datasets::QuestionTemplate>& templates) {
  BeforeAfterEvaluation ev;
  ev.report.task = "before_after";
  std::vector<TemporalRelation> predicted, gold;
  int unparsed = 0, low_confidence = 0;
  for (std::size_t k = 0; k < examples.size(); ++k) {
    const auto& ex = examples[k];
    nlohmann::ordered_json row;
    row["index"] = k;
    const auto parse = datasets::parse_mctaco_question(ex.question, templates);
    if (!parse || ex.context_events.empty()) {
      ++unparsed;
      row["status"] = "unparsed";
      ev.predictions.push_back(row);
      continue;
    }
    const auto match = datasets::match_question_event(parse->event_text, ex.context_events);
    low_confidence += match.low_confidence;
    std::vector<Event> input = ex.context_events;
    input.push_back(ex.answer_event);
    const int a_index = static_cast<int>(input.size()) - 1;
    const TemporalRelation label = ex.gold_relation.value_or(parse->relation);
    try {
      const auto order = orderer(input);
      const auto outcome = before_after_eval(order, match.index, a_index, label);
      predicted.push_back(outcome.predicted);
      gold.push_back(label);
      row["status"] = "ok";
      row["q_index"] = match.index;
      row["order"] = order;
      row["predicted"] = datasets::relation_name(outcome.predicted);
      row["gold"] = datasets::relation_name(label);
    } catch (const Error& e) {
      ++ev.report.n_errors;
      row["status"] = "error";
      row["error"] = e.what();
    }
    ev.predictions.push_back(row);
  }
  ev.report.n_examples = static_cast<int>(examples.size());
  ev.report.classification = classification_metrics(predicted, gold);
  ev.report.details["unparsed_questions"] = unparsed;
  ev.report.details["low_confidence_matches"] = low_confidence;
  return ev;
}

TemplateAccuracy template_accuracy(const std::vector<datasets::McTacoExample>& examples,
                                   const std::vector<datasets::QuestionTemplate>& templates) {
  auto norm = [](const std::string& s) {
    std::string out;
    for (const auto& t : datasets::rouge_tokens(s)) {
      if (!out.empty()) out += ' ';
      out += t;
    }
    return out;
  };
  TemplateAccuracy acc;
  for (const auto& ex : examples) {
    if (!ex.gold_relation || !ex.gold_event_text) continue;
    ++acc.n;
    const auto parse = datasets::parse_mctaco_question(ex.question, templates);
    if (!parse) continue;
    ++acc.parsed;
    acc.correct += parse->relation == *ex.gold_relation &&
                   norm(parse->event_text) == norm(*ex.gold_event_text);
  }
  return acc;
}

std::string scaling_csv(const std::vector<ScalingPoint>& points) {
  std::ostringstream out;
  out << "n_sequences,pairwise_accuracy,exact_match,insertion_em,final_loss\n";
  char buf[160];
  for (const auto& p : points) {
    std::snprintf(buf, sizeof buf, "%d,%.6f,%.6f,%.6f,%.6f\n", p.n_sequences,
                  p.pairwise_accuracy, p.exact_match, p.insertion_em, p.final_loss);
    out << buf;
  }
  return out.str();
}

}  // namespace tempo::eval
