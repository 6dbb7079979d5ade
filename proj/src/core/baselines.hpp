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

#ifndef TEMPO_CORE_BASELINES_HPP_
#define TEMPO_CORE_BASELINES_HPP_

#include <cstdint>
#include <string>
#include <vector>

#include "autograd.hpp"
#include "corruption.hpp"
#include "events.hpp"
#include "json.hpp"
#include "rng.hpp"
#include "seq2seq.hpp"
#include "transformer.hpp"
#include "vocab.hpp"

namespace tempo::baselines {

using ScoreMatrix = Eigen::MatrixXd;

// Largest sequence the exhaustive permutation search accepts.
inline constexpr int kMaxExactEvents = 8;

struct BaselineConfig {
  int vocab_size = 0;
  int d_model = 64;
  int n_heads = 4;
  int n_layers = 2;
  int d_ff = 256;
  int scorer_hidden = 64;
  double dropout = 0.1;
  int max_len = 256;
  std::uint64_t seed = 1;

  void validate() const;
  nlohmann::ordered_json to_json() const;
  static BaselineConfig from_json(const nlohmann::json& j);
};

// kPerEvent encodes every event on its own (positions restart, no attention
// across events), so event vectors do not depend on input order.
enum class EncodeMode { kFull, kPerEvent };

struct RunOptions {
  EncodeMode mode = EncodeMode::kFull;
  bool train = false;
  Rng* rng = nullptr;
};

// Transformer encoder over the plain-tagged input; returns one row per event
// taken at that event's [E] position.
class EventEncoder {
 public:
  EventEncoder(nn::ParameterSet<float>& ps, const BaselineConfig& cfg,
               Rng& init_rng);

  nn::Var encode(nn::Tape<float>& t, const text::Vocab& vocab,
                 const std::vector<events::Event>& events,
                 const RunOptions& opt) const;

 private:
  BaselineConfig cfg_;
  std::size_t tokens_ = 0, positions_ = 0;
  std::vector<nn::EncoderLayerIds> layers_;
  nn::NormIds final_;
};

// ---- pairwise scorer --------------------------------------------------

// Ordered pairs (i, j), i != j, row-major. Pair scores follow this order.
std::vector<std::pair<int, int>> ordered_pairs(int n);

class PairwiseModel {
 public:
  explicit PairwiseModel(const BaselineConfig& cfg);

  const BaselineConfig& config() const { return cfg_; }
  nn::ParameterSet<float>& params() { return params_; }
  const nn::ParameterSet<float>& params() const { return params_; }

  // (n(n-1) x 1) scores in ordered_pairs order.
  nn::Var pair_scores(nn::Tape<float>& t, const text::Vocab& vocab,
                      const std::vector<events::Event>& events,
                      const RunOptions& opt) const;

  // B[i][j] = score that event i precedes event j; the diagonal is 0.
  ScoreMatrix scores(const text::Vocab& vocab,
                     const std::vector<events::Event>& events,
                     EncodeMode mode = EncodeMode::kFull) const;

 private:
  PairwiseModel(const BaselineConfig& cfg, Rng init_rng);

  BaselineConfig cfg_;
  nn::ParameterSet<float> params_;
  EventEncoder encoder_;
  nn::LinearIds hidden_, out_;
};

// Sum of B[a][b] over every a ranked before b in `order` (rank -> index).
double order_score(const ScoreMatrix& b, const std::vector<int>& order);

// Number of index pairs whose relative order differs.
int misordered_pairs(const std::vector<int>& a, const std::vector<int>& b);

// Exact argmax over all orders; ties go to the lexicographically first.
std::vector<int> global_decode(const ScoreMatrix& b);

struct HingeResult {
  double loss = 0.0;
  std::vector<int> violator;  // loss-augmented argmax
};

HingeResult ssvm_loss(const ScoreMatrix& b, const std::vector<int>& gold);

seq2seq::TrainResult train_pairwise(
    PairwiseModel& model, const text::Vocab& vocab,
    const std::vector<corruption::OrderingExample>& data,
    const seq2seq::TrainConfig& cfg, const seq2seq::StepCallback& on_step = {});

// ---- pointer network --------------------------------------------------

class PointerModel {
 public:
  explicit PointerModel(const BaselineConfig& cfg);

  const BaselineConfig& config() const { return cfg_; }
  nn::ParameterSet<float>& params() { return params_; }
  const nn::ParameterSet<float>& params() const { return params_; }

  struct State {
    nn::Matrix<float> memory;  // event vectors, n x d
    nn::Matrix<float> h, c, input;
    std::vector<char> selected;
  };

  State begin(const text::Vocab& vocab,
              const std::vector<events::Event>& events) const;
  // Distribution over input positions; selected positions get 0.
  std::vector<double> step_distribution(const State& s) const;
  void advance(State& s, int chosen) const;
  std::vector<int> decode(const text::Vocab& vocab,
                          const std::vector<events::Event>& events) const;

  // Teacher-forced negative log-likelihood of `gold` (rank -> index).
  nn::Var sequence_loss(nn::Tape<float>& t, const text::Vocab& vocab,
                        const std::vector<events::Event>& events,
                        const std::vector<int>& gold,
                        const RunOptions& opt) const;

 private:
  PointerModel(const BaselineConfig& cfg, Rng init_rng);

  struct Cell {
    nn::Var h, c;
  };
  Cell lstm(nn::Tape<float>& t, nn::Var x, nn::Var h, nn::Var c) const;
  nn::Var pointer_logits(nn::Tape<float>& t, nn::Var memory, nn::Var h) const;

  BaselineConfig cfg_;
  nn::ParameterSet<float> params_;
  EventEncoder encoder_;
  nn::LinearIds gates_, query_;
  std::size_t start_ = 0;
};

seq2seq::TrainResult train_pointer(
    PointerModel& model, const text::Vocab& vocab,
    const std::vector<corruption::OrderingExample>& data,
    const seq2seq::TrainConfig& cfg, const seq2seq::StepCallback& on_step = {});

// ---- checkpoints ------------------------------------------------------

void save_pairwise(const std::string& path, const PairwiseModel& model);
PairwiseModel load_pairwise(const std::string& path);
void save_pointer(const std::string& path, const PointerModel& model);
PointerModel load_pointer(const std::string& path);

}  // namespace tempo::baselines

#endif  // TEMPO_CORE_BASELINES_HPP_
