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

#include "seq2seq.hpp"

#include <cmath>
#include <numeric>
#include <sstream>

#include "error.hpp"
#include "optim.hpp"
#include "vocab.hpp"

namespace tempo::seq2seq {

using nn::Matrix;
using nn::Tape;
using nn::Var;

namespace {

constexpr double kPositionInitStd = 0.5;

std::vector<int> iota_ids(std::size_t n) {
  std::vector<int> ids(n);
  std::iota(ids.begin(), ids.end(), 0);
  return ids;
}

std::vector<bool> valid_keys(std::span<const int> ids) {
  std::vector<bool> v(ids.size());
  for (std::size_t i = 0; i < ids.size(); ++i) v[i] = ids[i] != text::kPad;
  return v;
}

template <typename T>
void append_row(Matrix<T>& m, const Matrix<T>& row) {
  const auto n = m.rows();
  m.conservativeResize(n + 1, row.cols());
  m.row(n) = row.row(0);
}

}  // namespace

void ModelConfig::validate() const {
  if (vocab_size <= 0 || d_model <= 0 || n_heads <= 0 || n_enc_layers <= 0 ||
      n_dec_layers <= 0 || d_ff <= 0 || max_len <= 0) {
    throw Error(ErrorCode::kInvalidArgument,
                "model dimensions must all be positive");
  }
  if (d_model % n_heads != 0) {
    throw Error(ErrorCode::kInvalidArgument,
                "d_model must be divisible by n_heads");
  }
  if (!(dropout >= 0.0 && dropout < 1.0)) {
    throw Error(ErrorCode::kInvalidArgument, "dropout must lie in [0, 1)");
  }
}

nlohmann::ordered_json ModelConfig::to_json() const {
  nlohmann::ordered_json j;
  j["vocab_size"] = vocab_size;
  j["d_model"] = d_model;
  j["n_heads"] = n_heads;
  j["n_enc_layers"] = n_enc_layers;
  j["n_dec_layers"] = n_dec_layers;
  j["d_ff"] = d_ff;
  j["dropout"] = dropout;
  j["max_len"] = max_len;
  j["seed"] = seed;
  return j;
}

ModelConfig ModelConfig::from_json(const nlohmann::json& j) {
  ModelConfig c;
  for (const auto& [key, value] : j.items()) {
    if (key == "vocab_size") c.vocab_size = value.get<int>();
    else if (key == "d_model") c.d_model = value.get<int>();
    else if (key == "n_heads") c.n_heads = value.get<int>();
    else if (key == "n_enc_layers") c.n_enc_layers = value.get<int>();
    else if (key == "n_dec_layers") c.n_dec_layers = value.get<int>();
    else if (key == "d_ff") c.d_ff = value.get<int>();
    else if (key == "dropout") c.dropout = value.get<double>();
    else if (key == "max_len") c.max_len = value.get<int>();
    else if (key == "seed") c.seed = value.get<std::uint64_t>();
    else throw Error(ErrorCode::kConfigParse, "unknown model config key: " + key);
  }
  return c;
}

template <typename T>
Seq2SeqModel<T>::Seq2SeqModel(const ModelConfig& cfg) : cfg_(cfg) {
  cfg_.validate();
  Rng rng(cfg_.seed);
  const int d = cfg_.d_model;
  tokens_ = params_.add("embed.tokens", cfg_.vocab_size, d);
  nn::init_normal(params_[tokens_].value, 1.0 / std::sqrt(double(d)), rng);
  enc_pos_ = params_.add("embed.encoder_positions", cfg_.max_len, d);
  nn::init_normal(params_[enc_pos_].value, kPositionInitStd, rng);
  dec_pos_ = params_.add("embed.decoder_positions", cfg_.max_len, d);
  nn::init_normal(params_[dec_pos_].value, kPositionInitStd, rng);
  for (int l = 0; l < cfg_.n_enc_layers; ++l) {
    enc_layers_.push_back(nn::add_encoder_layer(
        params_, "encoder." + std::to_string(l), d, cfg_.d_ff, rng));
  }
  enc_final_ = nn::add_norm(params_, "encoder.final_norm", d);
  for (int l = 0; l < cfg_.n_dec_layers; ++l) {
    dec_layers_.push_back(nn::add_decoder_layer(
        params_, "decoder." + std::to_string(l), d, cfg_.d_ff, rng));
  }
  dec_final_ = nn::add_norm(params_, "decoder.final_norm", d);
}

template <typename T>
void Seq2SeqModel<T>::check_length(std::size_t n, const char* what) const {
  if (n == 0) {
    throw Error(ErrorCode::kInvalidArgument, std::string(what) + " is empty");
  }
  if (n > static_cast<std::size_t>(cfg_.max_len)) {
    throw Error(ErrorCode::kSizeLimit,
                std::string(what) + " length " + std::to_string(n) +
                    " exceeds max_len " + std::to_string(cfg_.max_len));
  }
}

template <typename T>
Var Seq2SeqModel<T>::forward(Tape<T>& t, std::span<const int> src,
                             std::span<const int> tgt_in,
                             const ForwardOptions& opt) const {
  check_length(src.size(), "source");
  check_length(tgt_in.size(), "target");
  const T emb_scale = std::sqrt(static_cast<T>(cfg_.d_model));
  nn::BlockOptions bo;
  bo.heads = cfg_.n_heads;
  bo.dropout = opt.train ? cfg_.dropout : 0.0;
  bo.rng = opt.train ? opt.rng : nullptr;
  const T p = static_cast<T>(bo.dropout);

  const Var tok = t.param(tokens_);
  auto embed = [&](std::span<const int> ids, std::size_t pos_param) {
    const Var e = t.scale(t.gather_rows(tok, ids), emb_scale);
    const auto pos = iota_ids(ids.size());
    return t.dropout(t.add(e, t.gather_rows(t.param(pos_param), pos)), p, bo.rng);
  };

  const auto keys = valid_keys(src);
  const Matrix<T> enc_mask = nn::key_padding_mask<T>(src.size(), keys);
  Var x = embed(src, enc_pos_);
  for (const auto& layer : enc_layers_) {
    x = nn::encoder_layer(t, x, layer, &enc_mask, bo, opt.attention);
  }
  const Var memory = nn::norm(t, x, enc_final_);

  const Matrix<T> self_mask = nn::causal_mask<T>(tgt_in.size());
  const Matrix<T> cross_mask = nn::key_padding_mask<T>(tgt_in.size(), keys);
  Var y = embed(tgt_in, dec_pos_);
  for (const auto& layer : dec_layers_) {
    y = nn::decoder_layer(t, y, memory, layer, &self_mask, &cross_mask, bo,
                          opt.attention);
  }
  return t.matmul_nt(nn::norm(t, y, dec_final_), tok);
}

template <typename T>
Matrix<T> Seq2SeqModel<T>::logits(std::span<const int> src,
                                  std::span<const int> tgt_in) const {
  Tape<T> t(params_, nullptr);
  return t.value(forward(t, src, tgt_in));
}

template <typename T>
Matrix<T> Seq2SeqModel<T>::embed_eval(std::span<const int> ids,
                                      std::size_t pos_param, int offset) const {
  const T emb_scale = std::sqrt(static_cast<T>(cfg_.d_model));
  const auto& tok = params_[tokens_].value;
  const auto& pos = params_[pos_param].value;
  Matrix<T> x(static_cast<Eigen::Index>(ids.size()), cfg_.d_model);
  for (std::size_t i = 0; i < ids.size(); ++i) {
    if (ids[i] < 0 || ids[i] >= cfg_.vocab_size) {
      throw Error(ErrorCode::kShapeMismatch, "token id outside vocabulary");
    }
    x.row(i) = tok.row(ids[i]) * emb_scale + pos.row(offset + i);
  }
  return x;
}

template <typename T>
typename Seq2SeqModel<T>::EncoderState Seq2SeqModel<T>::encode(
    std::span<const int> src) const {
  check_length(src.size(), "source");
  const auto keys = valid_keys(src);
  const Matrix<T> mask = nn::key_padding_mask<T>(src.size(), keys);
  Matrix<T> x = embed_eval(src, enc_pos_, 0);
  for (const auto& layer : enc_layers_) {
    x = nn::encoder_layer_eval(params_, x, layer, &mask, cfg_.n_heads);
  }
  const Matrix<T> memory = nn::norm_eval(params_, x, enc_final_);
  EncoderState st;
  st.cross_mask = nn::key_padding_mask<T>(1, keys);
  for (const auto& layer : dec_layers_) {
    st.cross_k.push_back(nn::linear_eval(params_, memory, layer.cross_attn.k));
    st.cross_v.push_back(nn::linear_eval(params_, memory, layer.cross_attn.v));
  }
  return st;
}

template <typename T>
typename Seq2SeqModel<T>::DecoderState Seq2SeqModel<T>::start() const {
  DecoderState st;
  st.self_k.assign(dec_layers_.size(), Matrix<T>(0, cfg_.d_model));
  st.self_v.assign(dec_layers_.size(), Matrix<T>(0, cfg_.d_model));
  return st;
}

template <typename T>
Matrix<T> Seq2SeqModel<T>::step(const EncoderState& enc, DecoderState& dec,
                                int token) const {
  if (dec.position >= cfg_.max_len) {
    throw Error(ErrorCode::kSizeLimit, "decoder position exceeds max_len");
  }
  const int ids[1] = {token};
  Matrix<T> x = embed_eval(ids, dec_pos_, dec.position);
  for (std::size_t l = 0; l < dec_layers_.size(); ++l) {
    const auto& layer = dec_layers_[l];
    const Matrix<T> h = nn::norm_eval(params_, x, layer.self_norm);
    append_row(dec.self_k[l], nn::linear_eval(params_, h, layer.self_attn.k));
    append_row(dec.self_v[l], nn::linear_eval(params_, h, layer.self_attn.v));
    x += nn::attend_eval(params_, nn::linear_eval(params_, h, layer.self_attn.q),
                         dec.self_k[l], dec.self_v[l], layer.self_attn,
                         cfg_.n_heads, static_cast<const Matrix<T>*>(nullptr));
    const Matrix<T> c = nn::norm_eval(params_, x, layer.cross_norm);
    x += nn::attend_eval(params_, nn::linear_eval(params_, c, layer.cross_attn.q),
                         enc.cross_k[l], enc.cross_v[l], layer.cross_attn,
                         cfg_.n_heads, &enc.cross_mask);
    x += nn::feed_forward_eval(params_, nn::norm_eval(params_, x, layer.ffn_norm),
                               layer.ffn);
  }
  ++dec.position;
  return nn::norm_eval(params_, x, dec_final_) *
         params_[tokens_].value.transpose();
}

template class Seq2SeqModel<float>;
template class Seq2SeqModel<double>;

template <typename From, typename To>
void copy_parameters(const Seq2SeqModel<From>& from, Seq2SeqModel<To>& to) {
  const auto& src = from.params();
  auto& dst = to.params();
  if (src.size() != dst.size()) {
    throw Error(ErrorCode::kShapeMismatch, "parameter count mismatch");
  }
  for (std::size_t i = 0; i < src.size(); ++i) {
    if (src[i].value.rows() != dst[i].value.rows() ||
        src[i].value.cols() != dst[i].value.cols()) {
      throw Error(ErrorCode::kShapeMismatch,
                  "parameter shape mismatch: " + src[i].name);
    }
    dst[i].value = src[i].value.template cast<To>();
  }
}

template void copy_parameters(const Seq2SeqModel<float>&, Seq2SeqModel<double>&);
template void copy_parameters(const Seq2SeqModel<double>&, Seq2SeqModel<float>&);
template void copy_parameters(const Seq2SeqModel<float>&, Seq2SeqModel<float>&);

std::vector<int> decoder_input(std::span<const int> tgt) {
  std::vector<int> v;
  v.reserve(tgt.size() + 1);
  v.push_back(text::kBos);
  v.insert(v.end(), tgt.begin(), tgt.end());
  return v;
}

std::vector<int> decoder_gold(std::span<const int> tgt) {
  std::vector<int> v(tgt.begin(), tgt.end());
  v.push_back(text::kEos);
  return v;
}

template <typename T>
LossValue token_loss(const Matrix<T>& logits, std::span<const int> gold,
                     int pad_id) {
  if (static_cast<Eigen::Index>(gold.size()) != logits.rows()) {
    throw Error(ErrorCode::kShapeMismatch, "loss: gold length != logits rows");
  }
  LossValue out;
  double total = 0.0;
  std::size_t count = 0;
  for (std::size_t r = 0; r < gold.size(); ++r) {
    if (gold[r] == pad_id) continue;
    const auto row = logits.row(r).template cast<double>();
    const double mx = row.maxCoeff();
    const double lse = mx + std::log((row.array() - mx).exp().sum());
    total += lse - row(gold[r]);
    ++count;
  }
  if (count == 0) {
    out.empty = true;
    return out;
  }
  out.value = total / static_cast<double>(count);
  return out;
}

template LossValue token_loss(const Matrix<float>&, std::span<const int>, int);
template LossValue token_loss(const Matrix<double>&, std::span<const int>, int);

void TrainConfig::validate() const {
  if (batch_size < 1) {
    throw Error(ErrorCode::kInvalidArgument, "batch_size must be >= 1");
  }
  if (resolved_total_steps() < 1) {
    throw Error(ErrorCode::kInvalidArgument, "total_steps must be >= 1");
  }
  if (warmup_steps < 0 || warmup_steps > resolved_total_steps()) {
    throw Error(ErrorCode::kInvalidArgument,
                "warmup_steps must lie in [0, total_steps]");
  }
  if (!(learning_rate > 0.0)) {
    throw Error(ErrorCode::kInvalidArgument, "learning_rate must be positive");
  }
}

nlohmann::ordered_json TrainConfig::to_json() const {
  nlohmann::ordered_json j;
  j["learning_rate"] = learning_rate;
  j["warmup_steps"] = warmup_steps;
  j["total_steps"] = total_steps;
  j["schedule"] = "linear-decay-after-warmup";
  j["batch_size"] = batch_size;
  j["epochs"] = epochs;
  j["updates_per_epoch"] = updates_per_epoch;
  j["grad_clip_norm"] = grad_clip_norm;
  j["seed"] = seed;
  return j;
}

TrainConfig TrainConfig::from_json(const nlohmann::json& j) {
  TrainConfig c;
  for (const auto& [key, value] : j.items()) {
    if (key == "learning_rate") c.learning_rate = value.get<double>();
    else if (key == "warmup_steps") c.warmup_steps = value.get<int>();
    else if (key == "total_steps") c.total_steps = value.get<int>();
    else if (key == "batch_size") c.batch_size = value.get<int>();
    else if (key == "epochs") c.epochs = value.get<int>();
    else if (key == "updates_per_epoch") c.updates_per_epoch = value.get<int>();
    else if (key == "grad_clip_norm") c.grad_clip_norm = value.get<double>();
    else if (key == "seed") c.seed = value.get<std::uint64_t>();
    else if (key == "schedule") {
      if (value.get<std::string>() != "linear-decay-after-warmup") {
        throw Error(ErrorCode::kConfigParse,
                    "unsupported schedule: " + value.get<std::string>());
      }
    } else {
      throw Error(ErrorCode::kConfigParse, "unknown train config key: " + key);
    }
  }
  return c;
}

TrainResult train(Seq2SeqModel<float>& model,
                  const std::vector<EncodedPair>& data, const TrainConfig& cfg,
                  const StepCallback& on_step) {
  cfg.validate();
  if (data.empty()) {
    throw Error(ErrorCode::kInvalidArgument, "no training data");
  }
  const int total = cfg.resolved_total_steps();
  auto& params = model.params();
  nn::Adam<float> adam(params);
  nn::Gradients<float> grads(params);
  Rng order_rng(derive_seed(cfg.seed, 0));
  Rng dropout_rng(derive_seed(cfg.seed, 1));
  const bool use_dropout = model.config().dropout > 0.0;

  std::vector<std::size_t> order(data.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  order_rng.shuffle(order);
  std::size_t cursor = 0;

  TrainResult result;
  result.loss_curve.reserve(total);
  std::vector<std::size_t> batch;
  for (int step = 1; step <= total; ++step) {
    batch.clear();
    for (int b = 0; b < cfg.batch_size; ++b) {
      if (cursor == order.size()) {
        order_rng.shuffle(order);
        cursor = 0;
      }
      batch.push_back(order[cursor++]);
    }
    std::size_t tokens = 0;
    for (auto i : batch) tokens += data[i].tgt.size() + 1;
    const float inv_tokens = 1.0f / static_cast<float>(tokens);

    grads.zero();
    double loss_sum = 0.0;
    for (auto i : batch) {
      const auto tgt_in = decoder_input(data[i].tgt);
      const auto gold = decoder_gold(data[i].tgt);
      Tape<float> tape(params, &grads);
      typename Seq2SeqModel<float>::ForwardOptions opt;
      opt.train = use_dropout;
      opt.rng = &dropout_rng;
      const Var logits = model.forward(tape, data[i].src, tgt_in, opt);
      const Var ce = tape.cross_entropy_sum(logits, gold, text::kPad);
      loss_sum += tape.scalar(ce);
      tape.backward(tape.scale(ce, inv_tokens));
    }
    const double loss = loss_sum / static_cast<double>(tokens);
    if (!std::isfinite(loss)) {
      std::ostringstream msg;
      msg << "non-finite loss at step " << step << " (loss=" << loss
          << ", gradient norm=" << std::sqrt(double(grads.squared_norm()))
          << ")";
      throw Error(ErrorCode::kNumeric, msg.str());
    }
    nn::clip_global_norm(grads, cfg.grad_clip_norm);
    const double lr =
        nn::warmup_linear_decay(cfg.learning_rate, step, cfg.warmup_steps, total);
    adam.step(params, grads, lr);
    result.loss_curve.push_back(loss);
    if (on_step) on_step(step, loss, lr);
  }
  return result;
}

double token_accuracy(const Seq2SeqModel<float>& model,
                      const std::vector<EncodedPair>& data) {
  std::size_t right = 0, total = 0;
  for (const auto& ex : data) {
    const auto gold = decoder_gold(ex.tgt);
    const Matrix<float> logits = model.logits(ex.src, decoder_input(ex.tgt));
    for (std::size_t r = 0; r < gold.size(); ++r) {
      Eigen::Index best;
      logits.row(r).maxCoeff(&best);
      right += (best == gold[r]);
      ++total;
    }
  }
  return total ? static_cast<double>(right) / static_cast<double>(total) : 0.0;
}

double gradient_error(double analytic, double numeric, double absolute_below) {
  const double diff = std::abs(analytic - numeric);
  const double scale = std::max(std::abs(analytic), std::abs(numeric));
  if (scale < absolute_below) return diff;
  return diff / scale;
}

namespace {

template <typename T>
double mean_loss(const Seq2SeqModel<T>& model, const EncodedPair& ex) {
  const auto gold = decoder_gold(ex.tgt);
  return token_loss(model.logits(ex.src, decoder_input(ex.tgt)), gold,
                    text::kPad)
      .value;
}

template <typename T>
nn::Gradients<T> analytic_gradients(Seq2SeqModel<T>& model,
                                    const EncodedPair& ex) {
  nn::Gradients<T> grads(model.params());
  Tape<T> tape(model.params(), &grads);
  const auto gold = decoder_gold(ex.tgt);
  const Var logits = model.forward(tape, ex.src, decoder_input(ex.tgt));
  const Var ce = tape.cross_entropy_sum(logits, gold, text::kPad);
  tape.backward(tape.scale(ce, T(1) / static_cast<T>(gold.size())));
  return grads;
}

GradCheckResult compare_central_differences(
    Seq2SeqModel<double>& probe, const EncodedPair& ex, double step,
    double absolute_below,
    const std::function<double(std::size_t, Eigen::Index)>& analytic) {
  GradCheckResult res;
  auto& ps = probe.params();
  for (std::size_t p = 0; p < ps.size(); ++p) {
    auto& value = ps[p].value;
    for (Eigen::Index i = 0; i < value.size(); ++i) {
      const double saved = value.data()[i];
      value.data()[i] = saved + step;
      const double up = mean_loss(probe, ex);
      value.data()[i] = saved - step;
      const double down = mean_loss(probe, ex);
      value.data()[i] = saved;
      const double numeric = (up - down) / (2.0 * step);
      const double err = gradient_error(analytic(p, i), numeric, absolute_below);
      if (res.worst_parameter.empty() || err > res.max_relative_error) {
        res.max_relative_error = err;
        res.worst_parameter = ps[p].name + "[" + std::to_string(i) + "]";
      }
      ++res.checked;
    }
  }
  return res;
}

}  // namespace

GradCheckResult grad_check(Seq2SeqModel<double>& model,
                           const EncodedPair& example, double step) {
  const auto grads = analytic_gradients(model, example);
  return compare_central_differences(model, example, step, 1e-6,
                 [&](std::size_t p, Eigen::Index i) {
                   return grads.touched(p) ? grads.raw(p).data()[i] : 0.0;
                 });
}

GradCheckResult grad_check_single(const Seq2SeqModel<float>& model,
                                  const EncodedPair& example, double step) {
  Seq2SeqModel<float> copy(model.config());
  copy_parameters(model, copy);
  const auto grads = analytic_gradients(copy, example);
  Seq2SeqModel<double> probe(model.config());
  copy_parameters(model, probe);
  // Float round-off is ~1e-8 absolute here, so gradients below 1e-4 are
  // compared absolutely.
  return compare_central_differences(probe, example, step, 1e-4,
                 [&](std::size_t p, Eigen::Index i) {
                   return grads.touched(p)
                              ? static_cast<double>(grads.raw(p).data()[i])
                              : 0.0;
                 });
}

}  // namespace tempo::seq2seq
