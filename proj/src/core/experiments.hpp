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

#ifndef TEMPO_CORE_EXPERIMENTS_HPP_
#define TEMPO_CORE_EXPERIMENTS_HPP_

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "baselines.hpp"
#include "corruption.hpp"
#include "datasets.hpp"
#include "decoding.hpp"
#include "eval.hpp"
#include "events.hpp"
#include "json.hpp"
#include "seq2seq.hpp"
#include "vocab.hpp"

namespace tempo::experiments {

struct Paths {
  std::string data_dir;  // schema, template and fixture files
  std::string out_dir = "runs/latest";
};

// Everything a run needs. Sections mirror the JSON layout; unknown keys are
// rejected at every level.
struct RunConfig {
  std::string preset = "toy";
  Paths paths;
  seq2seq::ModelConfig model;
  baselines::BaselineConfig baseline;
  seq2seq::TrainConfig train;
  corruption::CorruptionConfig corruption;
  decoding::DecodeConfig decode;
  events::TagScheme scheme{events::TagVariant::kIndexed, 16};
  int min_count = 1;
  std::uint64_t seed = 1;

  static RunConfig toy();
  static RunConfig paper();
  static RunConfig named_preset(const std::string& name);

  // Starts from the preset named in j (default "toy") and applies j on top.
  static RunConfig from_json(const nlohmann::json& j);
  nlohmann::ordered_json to_json() const;
  void validate() const;
};

// Default data directory: $TEMPO_DATA_DIR, else the build-time location.
std::string default_data_dir();

std::uint64_t fnv1a64(const std::string& bytes);
std::string hex64(std::uint64_t v);
std::string config_hash(const RunConfig& cfg);

// ---- models -----------------------------------------------------------

using AnyModel = std::variant<seq2seq::Seq2SeqModel<float>, baselines::PairwiseModel,
                              baselines::PointerModel>;

std::string model_kind(const AnyModel& m);
AnyModel load_model(const std::string& path);
void save_model(const std::string& path, const AnyModel& m);

// Event tokens of every sequence, plus the fixed specials.
text::Vocab build_corpus_vocab(const std::vector<events::EventSequence>& corpus,
                               const RunConfig& cfg);

seq2seq::Seq2SeqModel<float> new_seq2seq(const RunConfig& cfg, const text::Vocab& vocab);
AnyModel new_model(const std::string& kind, const RunConfig& cfg, const text::Vocab& vocab);

// Denoising objective for seq2seq; shuffle-only ordering sets for baselines.
seq2seq::TrainResult train_model(AnyModel& model, const text::Vocab& vocab,
                                 const std::vector<events::EventSequence>& corpus,
                                 const RunConfig& cfg,
                                 const seq2seq::StepCallback& on_step = {});

// How a seq2seq model turns an input into an order.
enum class OrderingMode { kGenerate, kScoreGen, kScoreTag };
OrderingMode parse_ordering_mode(const std::string& name);
std::string ordering_mode_name(OrderingMode mode);

eval::Orderer make_orderer(const AnyModel& model, const text::Vocab& vocab,
                           const RunConfig& cfg,
                           OrderingMode mode = OrderingMode::kGenerate);

// Seq2seq only: ranks with P^gen or P^tag.
eval::InsertionRanker make_ranker(const AnyModel& model, const text::Vocab& vocab,
                                  const RunConfig& cfg,
                                  decoding::ScoreMode mode = decoding::ScoreMode::kGen);

// ---- drivers ----------------------------------------------------------

nlohmann::ordered_json grad_check_report(const RunConfig& cfg);

struct TimexProbeOptions {
  datasets::TimexKind kind = datasets::TimexKind::kYear;
  int train_sequences = 20000;
  int eval_examples = 100;
  int events_per_sequence = 3;
  // Year probes hold this range out of training and evaluate inside it.
  std::pair<int, int> held_out_years{1900, 1999};
  double window_prob = 0.8;
  int window_width = 60;

  nlohmann::ordered_json to_json() const;
};

struct ProbeResult {
  eval::OrderingEvaluation evaluation;
  std::vector<corruption::OrderingExample> eval_set;
  std::vector<double> loss_curve;  // empty when a trained model was given
};

// Trains a fresh seq2seq model on timex sequences unless `trained` is set,
// then orders the evaluation fixtures by generation.
ProbeResult timex_probe(const RunConfig& cfg, const TimexProbeOptions& opt,
                        const AnyModel* trained = nullptr,
                        const text::Vocab* trained_vocab = nullptr,
                        const seq2seq::StepCallback& on_step = {});

struct SchemaSplit {
  std::vector<events::EventSequence> train;
  std::vector<events::EventSequence> held_out;
};

// Training and held-out sequences drawn from independent seed streams.
SchemaSplit schema_split(const std::vector<datasets::ScenarioSchema>& schemas,
                         int n_train, int n_held_out, std::uint64_t seed,
                         double drop_prob = 0.0);

struct ScalingOptions {
  std::vector<int> sizes{250, 1000, 4000};
  int held_out = 200;
};

std::vector<eval::ScalingPoint> scaling_curve(
    const RunConfig& cfg, const std::vector<datasets::ScenarioSchema>& schemas,
    const ScalingOptions& opt, const seq2seq::StepCallback& on_step = {});

struct AblationArm {
  double deletion_prob = 0.0;
  eval::InsertionEvaluation by_gen;
  std::optional<eval::InsertionEvaluation> by_tag;  // indexed scheme only
  std::vector<double> loss_curve;
  std::shared_ptr<const AnyModel> model;
  std::shared_ptr<const text::Vocab> vocab;  // shared by every arm
};

// Trains one seq2seq model per deletion probability on the same schema
// sequences and vocabulary, then ranks insertion positions on held-out
// sequences with each.
std::vector<AblationArm> deletion_ablation(
    const RunConfig& cfg, const std::vector<datasets::ScenarioSchema>& schemas,
    int n_train, int n_held_out, const std::vector<double>& deletion_probs,
    const seq2seq::StepCallback& on_step = {});

}  // namespace tempo::experiments

#endif  // TEMPO_CORE_EXPERIMENTS_HPP_
