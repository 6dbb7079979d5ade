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

#ifndef TEMPO_CORE_SEQ2SEQ_HPP_
#define TEMPO_CORE_SEQ2SEQ_HPP_

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "autograd.hpp"
#include "json.hpp"
#include "transformer.hpp"

namespace tempo::seq2seq {

struct ModelConfig {
  int vocab_size = 0;
  int d_model = 128;
  int n_heads = 4;
  int n_enc_layers = 2;
  int n_dec_layers = 2;
  int d_ff = 512;
  double dropout = 0.1;
  int max_len = 256;
  std::uint64_t seed = 1;

  void validate() const;
  nlohmann::ordered_json to_json() const;
  static ModelConfig from_json(const nlohmann::json& j);
};

// Encoder-decoder transformer with pre-norm blocks, learned positions and a
// token embedding shared by encoder input, decoder input and output layer.
template <typename T>
class Seq2SeqModel {
 public:
  explicit Seq2SeqModel(const ModelConfig& cfg);

  const ModelConfig& config() const { return cfg_; }
  nn::ParameterSet<T>& params() { return params_; }
  const nn::ParameterSet<T>& params() const { return params_; }

  struct ForwardOptions {
    bool train = false;  // enables dropout; requires rng
    Rng* rng = nullptr;
    // When set, receives every attention probability map in forward order.
    std::vector<nn::Matrix<T>>* attention = nullptr;
  };

  // tgt_in is the decoder input (BOS followed by target tokens). Returns
  // a (|tgt_in| x vocab) logits variable.
  nn::Var forward(nn::Tape<T>& tape, std::span<const int> src,
                  std::span<const int> tgt_in,
                  const ForwardOptions& opt = ForwardOptions{}) const;

  nn::Matrix<T> logits(std::span<const int> src,
                       std::span<const int> tgt_in) const;

  struct EncoderState {
    nn::Matrix<T> cross_mask;  // 1 x |src|
    std::vector<nn::Matrix<T>> cross_k, cross_v;
  };
  struct DecoderState {
    std::vector<nn::Matrix<T>> self_k, self_v;
    int position = 0;
  };

  EncoderState encode(std::span<const int> src) const;
  DecoderState start() const;
  // Consumes one decoder input token and returns 1 x vocab next-token logits.
  nn::Matrix<T> step(const EncoderState& enc, DecoderState& dec,
                     int token) const;

 private:
  void check_length(std::size_t n, const char* what) const;
  nn::Matrix<T> embed_eval(std::span<const int> ids, std::size_t pos_param,
                           int offset) const;

  ModelConfig cfg_;
  nn::ParameterSet<T> params_;
  std::size_t tokens_ = 0, enc_pos_ = 0, dec_pos_ = 0;
  std::vector<nn::EncoderLayerIds> enc_layers_;
  std::vector<nn::DecoderLayerIds> dec_layers_;
  nn::NormIds enc_final_, dec_final_;
};

// Copies parameter values between models of the same configuration.
template <typename From, typename To>
void copy_parameters(const Seq2SeqModel<From>& from, Seq2SeqModel<To>& to);

// Training pair in token ids; tgt holds the target tokens without BOS/EOS.
struct EncodedPair {
  std::vector<int> src;
  std::vector<int> tgt;
};

std::vector<int> decoder_input(std::span<const int> tgt);  // BOS + tgt
std::vector<int> decoder_gold(std::span<const int> tgt);   // tgt + EOS

struct LossValue {
  double value = 0.0;
  bool empty = false;  // no non-PAD gold positions; value is 0
};

// Mean token cross-entropy over non-PAD gold positions.
template <typename T>
LossValue token_loss(const nn::Matrix<T>& logits, std::span<const int> gold,
                     int pad_id);

struct TrainConfig {
  double learning_rate = 3e-4;
  int warmup_steps = 500;
  int total_steps = 0;  // 0: epochs * updates_per_epoch
  int batch_size = 16;
  int epochs = 1;
  int updates_per_epoch = 2000;
  double grad_clip_norm = 1.0;
  std::uint64_t seed = 7;

  int resolved_total_steps() const {
    return total_steps > 0 ? total_steps : epochs * updates_per_epoch;
  }
  void validate() const;
  nlohmann::ordered_json to_json() const;
  static TrainConfig from_json(const nlohmann::json& j);
};

struct TrainResult {
  std::vector<double> loss_curve;  // one mean token loss per update
};

using StepCallback = std::function<void(int step, double loss, double lr)>;

TrainResult train(Seq2SeqModel<float>& model,
                  const std::vector<EncodedPair>& data,
                  const TrainConfig& cfg, const StepCallback& on_step = {});

// Teacher-forced argmax accuracy over gold tokens (EOS included).
double token_accuracy(const Seq2SeqModel<float>& model,
                      const std::vector<EncodedPair>& data);

struct GradCheckResult {
  double max_relative_error = 0.0;
  std::string worst_parameter;
  std::size_t checked = 0;
};

// Relative error, falling back to the absolute difference when both
// magnitudes are below `absolute_below`.
double gradient_error(double analytic, double numeric,
                      double absolute_below = 1e-6);

// Analytic gradients of the mean token loss against central differences
// over every parameter element. Dropout is not applied.
GradCheckResult grad_check(Seq2SeqModel<double>& model,
                           const EncodedPair& example, double step = 1e-4);

// Single-precision analytic gradients against double-precision central
// differences of the same weights.
GradCheckResult grad_check_single(const Seq2SeqModel<float>& model,
                                  const EncodedPair& example,
                                  double step = 1e-4);

}  // namespace tempo::seq2seq

#endif  // TEMPO_CORE_SEQ2SEQ_HPP_
