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

#include "baselines.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

#include "checkpoint.hpp"
#include "error.hpp"
#include "optim.hpp"

namespace tempo::baselines {

using events::Event;
using nn::Matrix;
using nn::Tape;
using nn::Var;

void BaselineConfig::validate() const {
  if (vocab_size <= 0 || d_model <= 0 || n_heads <= 0 || n_layers <= 0 ||
      d_ff <= 0 || scorer_hidden <= 0 || max_len <= 0) {
    throw Error(ErrorCode::kInvalidArgument,
                "baseline dimensions must all be positive");
  }
  if (d_model % n_heads != 0) {
    throw Error(ErrorCode::kInvalidArgument, "d_model must be divisible by n_heads");
  }
  if (!(dropout >= 0.0 && dropout < 1.0)) {
    throw Error(ErrorCode::kInvalidArgument, "dropout must lie in [0, 1)");
  }
}

nlohmann::ordered_json BaselineConfig::to_json() const {
  nlohmann::ordered_json j;
  j["vocab_size"] = vocab_size;
  j["d_model"] = d_model;
  j["n_heads"] = n_heads;
  j["n_layers"] = n_layers;
  j["d_ff"] = d_ff;
  j["scorer_hidden"] = scorer_hidden;
  j["dropout"] = dropout;
  j["max_len"] = max_len;
  j["seed"] = seed;
  return j;
}

BaselineConfig BaselineConfig::from_json(const nlohmann::json& j) {
  BaselineConfig c;
  try {
    for (const auto& [key, value] : j.items()) {
      if (key == "vocab_size") c.vocab_size = value.get<int>();
      else if (key == "d_model") c.d_model = value.get<int>();
      else if (key == "n_heads") c.n_heads = value.get<int>();
      else if (key == "n_layers") c.n_layers = value.get<int>();
      else if (key == "d_ff") c.d_ff = value.get<int>();
      else if (key == "scorer_hidden") c.scorer_hidden = value.get<int>();
      else if (key == "dropout") c.dropout = value.get<double>();
      else if (key == "max_len") c.max_len = value.get<int>();
      else if (key == "seed") c.seed = value.get<std::uint64_t>();
      else throw Error(ErrorCode::kConfigParse, "unknown baseline config key: " + key);
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kConfigParse, std::string("baseline config: ") + e.what());
  }
  return c;
}

// ---- encoder ----------------------------------------------------------

EventEncoder::EventEncoder(nn::ParameterSet<float>& ps, const BaselineConfig& cfg,
                           Rng& init_rng)
    : cfg_(cfg) {
  cfg_.validate();
  const int d = cfg_.d_model;
  tokens_ = ps.add("encoder.tokens", cfg_.vocab_size, d);
  nn::init_normal(ps[tokens_].value, 1.0 / std::sqrt(double(d)), init_rng);
  positions_ = ps.add("encoder.positions", cfg_.max_len, d);
  nn::init_normal(ps[positions_].value, 0.5, init_rng);
  for (int l = 0; l < cfg_.n_layers; ++l) {
    layers_.push_back(nn::add_encoder_layer(ps, "encoder." + std::to_string(l),
                                            d, cfg_.d_ff, init_rng));
  }
  final_ = nn::add_norm(ps, "encoder.final_norm", d);
}

Var EventEncoder::encode(Tape<float>& t, const text::Vocab& vocab,
                         const std::vector<Event>& events,
                         const RunOptions& opt) const {
  const events::TagScheme plain{events::TagVariant::kPlain};
  std::vector<int> ids, positions, tags, owner;
  if (opt.mode == EncodeMode::kFull) {
    ids = vocab.encode(events::render_input(events, plain).text);
    positions.resize(ids.size());
    std::iota(positions.begin(), positions.end(), 0);
  } else {
    for (std::size_t e = 0; e < events.size(); ++e) {
      const auto part = vocab.encode(events::render_input({events[e]}, plain).text);
      for (std::size_t k = 0; k < part.size(); ++k) {
        ids.push_back(part[k]);
        positions.push_back(static_cast<int>(k));
        owner.push_back(static_cast<int>(e));
      }
    }
  }
  for (std::size_t k = 0; k < ids.size(); ++k) {
    if (ids[k] == text::kEvent) tags.push_back(static_cast<int>(k));
  }
  if (tags.size() != events.size()) {
    throw Error(ErrorCode::kShapeMismatch,
                "found " + std::to_string(tags.size()) + " event tags for " +
                    std::to_string(events.size()) + " events");
  }
  const int longest = positions.empty() ? 0 : *std::max_element(positions.begin(), positions.end()) + 1;
  if (longest > cfg_.max_len) {
    throw Error(ErrorCode::kSizeLimit,
                "encoder input length " + std::to_string(longest) +
                    " exceeds max_len " + std::to_string(cfg_.max_len));
  }

  const auto n = static_cast<Eigen::Index>(ids.size());
  Matrix<float> mask = Matrix<float>::Zero(n, n);
  if (opt.mode == EncodeMode::kPerEvent) {
    const float ninf = -std::numeric_limits<float>::infinity();
    for (Eigen::Index r = 0; r < n; ++r) {
      for (Eigen::Index c = 0; c < n; ++c) {
        if (owner[static_cast<std::size_t>(r)] != owner[static_cast<std::size_t>(c)]) mask(r, c) = ninf;
      }
    }
  }

  nn::BlockOptions bo;
  bo.heads = cfg_.n_heads;
  bo.dropout = opt.train ? cfg_.dropout : 0.0;
  bo.rng = opt.train ? opt.rng : nullptr;
  const Var emb = t.scale(t.gather_rows(t.param(tokens_), ids),
                          std::sqrt(static_cast<float>(cfg_.d_model)));
  Var x = t.dropout(t.add(emb, t.gather_rows(t.param(positions_), positions)),
                    static_cast<float>(bo.dropout), bo.rng);
  for (const auto& layer : layers_) x = nn::encoder_layer(t, x, layer, &mask, bo);
  return t.gather_rows(nn::norm(t, x, final_), tags);
}

// ---- shared training loop --------------------------------------------

namespace {

// `example_loss` returns the per-example loss value and the variable to
// backpropagate, or nothing when the example contributes no gradient.
template <typename ExampleLoss>
seq2seq::TrainResult run_training(nn::ParameterSet<float>& params,
                                  std::size_t n_examples,
                                  const seq2seq::TrainConfig& cfg,
                                  ExampleLoss&& example_loss,
                                  const seq2seq::StepCallback& on_step) {
  cfg.validate();
  if (n_examples == 0) throw Error(ErrorCode::kInvalidArgument, "no training data");
  const int total = cfg.resolved_total_steps();
  nn::Adam<float> adam(params);
  nn::Gradients<float> grads(params);
  Rng order_rng(derive_seed(cfg.seed, 0));
  Rng dropout_rng(derive_seed(cfg.seed, 1));

  std::vector<std::size_t> order(n_examples);
  std::iota(order.begin(), order.end(), std::size_t{0});
  order_rng.shuffle(order);
  std::size_t cursor = 0;
  const float inv_batch = 1.0f / static_cast<float>(cfg.batch_size);

  seq2seq::TrainResult result;
  for (int step = 1; step <= total; ++step) {
    grads.zero();
    double loss_sum = 0.0;
    for (int b = 0; b < cfg.batch_size; ++b) {
      if (cursor == order.size()) {
        order_rng.shuffle(order);
        cursor = 0;
      }
      Tape<float> tape(params, &grads);
      const auto [value, var] = example_loss(tape, order[cursor++], dropout_rng);
      loss_sum += value;
      if (var) tape.backward(tape.scale(*var, inv_batch));
    }
    const double loss = loss_sum / cfg.batch_size;
    if (!std::isfinite(loss)) {
      std::ostringstream msg;
      msg << "non-finite loss at step " << step << " (loss=" << loss
          << ", gradient norm=" << std::sqrt(double(grads.squared_norm())) << ")";
      throw Error(ErrorCode::kNumeric, msg.str());
    }
    nn::clip_global_norm(grads, cfg.grad_clip_norm);
    const double lr = nn::warmup_linear_decay(cfg.learning_rate, step,
                                              cfg.warmup_steps, total);
    adam.step(params, grads, lr);
    result.loss_curve.push_back(loss);
    if (on_step) on_step(step, loss, lr);
  }
  return result;
}

void check_exact_size(std::size_t n) {
  if (n > static_cast<std::size_t>(kMaxExactEvents)) {
    throw Error(ErrorCode::kSizeLimit,
                "exact permutation search supports at most " +
                    std::to_string(kMaxExactEvents) + " events, got " +
                    std::to_string(n));
  }
}

void check_permutation(const std::vector<int>& perm, std::size_t n) {
  std::vector<int> sorted = perm;
  std::sort(sorted.begin(), sorted.end());
  bool ok = sorted.size() == n;
  for (std::size_t i = 0; ok && i < n; ++i) ok = sorted[i] == static_cast<int>(i);
  if (!ok) throw Error(ErrorCode::kShapeMismatch, "order is not a permutation of 0..n-1");
}

}  // namespace

// ---- pairwise scorer --------------------------------------------------

std::vector<std::pair<int, int>> ordered_pairs(int n) {
  std::vector<std::pair<int, int>> out;
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      if (i != j) out.emplace_back(i, j);
    }
  }
  return out;
}

namespace {

Rng seeded(const BaselineConfig& cfg) {
  cfg.validate();
  return Rng(cfg.seed);
}

}  // namespace

PairwiseModel::PairwiseModel(const BaselineConfig& cfg)
    : PairwiseModel(cfg, seeded(cfg)) {}

PairwiseModel::PairwiseModel(const BaselineConfig& cfg, Rng rng)
    : cfg_(cfg), encoder_(params_, cfg, rng) {
  hidden_ = nn::add_linear(params_, "scorer.hidden", 3 * cfg.d_model,
                           cfg.scorer_hidden, rng);
  out_ = nn::add_linear(params_, "scorer.out", cfg.scorer_hidden, 1, rng);
}

Var PairwiseModel::pair_scores(Tape<float>& t, const text::Vocab& vocab,
                               const std::vector<Event>& events,
                               const RunOptions& opt) const {
  if (events.size() < 2) {
    throw Error(ErrorCode::kInvalidArgument, "pairwise scoring needs at least 2 events");
  }
  const Var u = encoder_.encode(t, vocab, events, opt);
  std::vector<int> left, right;
  for (const auto& [i, j] : ordered_pairs(static_cast<int>(events.size()))) {
    left.push_back(i);
    right.push_back(j);
  }
  const Var ui = t.gather_rows(u, left);
  const Var uj = t.gather_rows(u, right);
  const Var features = t.concat_cols({ui, uj, t.hadamard(ui, uj)});
  return nn::linear(t, t.gelu(nn::linear(t, features, hidden_)), out_);
}

ScoreMatrix PairwiseModel::scores(const text::Vocab& vocab,
                                  const std::vector<Event>& events,
                                  EncodeMode mode) const {
  Tape<float> t(params_, nullptr);
  RunOptions opt;
  opt.mode = mode;
  const Matrix<float>& s = t.value(pair_scores(t, vocab, events, opt));
  const int n = static_cast<int>(events.size());
  ScoreMatrix b = ScoreMatrix::Zero(n, n);
  Eigen::Index k = 0;
  for (const auto& [i, j] : ordered_pairs(n)) b(i, j) = s(k++, 0);
  return b;
}

double order_score(const ScoreMatrix& b, const std::vector<int>& order) {
  double total = 0.0;
  for (std::size_t x = 0; x < order.size(); ++x) {
    for (std::size_t y = x + 1; y < order.size(); ++y) total += b(order[x], order[y]);
  }
  return total;
}

int misordered_pairs(const std::vector<int>& a, const std::vector<int>& b) {
  if (a.size() != b.size()) {
    throw Error(ErrorCode::kShapeMismatch, "orders have different lengths");
  }
  std::vector<int> rank_b(b.size());
  for (std::size_t r = 0; r < b.size(); ++r) rank_b[static_cast<std::size_t>(b[r])] = static_cast<int>(r);
  int count = 0;
  for (std::size_t x = 0; x < a.size(); ++x) {
    for (std::size_t y = x + 1; y < a.size(); ++y) {
      if (rank_b[static_cast<std::size_t>(a[x])] > rank_b[static_cast<std::size_t>(a[y])]) ++count;
    }
  }
  return count;
}

std::vector<int> global_decode(const ScoreMatrix& b) {
  check_exact_size(static_cast<std::size_t>(b.rows()));
  std::vector<int> perm(static_cast<std::size_t>(b.rows()));
  std::iota(perm.begin(), perm.end(), 0);
  std::vector<int> best = perm;
  double best_score = -std::numeric_limits<double>::infinity();
  do {
    const double s = order_score(b, perm);
    if (s > best_score) {
      best_score = s;
      best = perm;
    }
  } while (std::next_permutation(perm.begin(), perm.end()));
  return best;
}

HingeResult ssvm_loss(const ScoreMatrix& b, const std::vector<int>& gold) {
  check_exact_size(gold.size());
  check_permutation(gold, static_cast<std::size_t>(b.rows()));
  std::vector<int> perm(gold.size());
  std::iota(perm.begin(), perm.end(), 0);
  HingeResult r;
  double best = -std::numeric_limits<double>::infinity();
  do {
    const double v = misordered_pairs(perm, gold) + order_score(b, perm);
    if (v > best) {
      best = v;
      r.violator = perm;
    }
  } while (std::next_permutation(perm.begin(), perm.end()));
  r.loss = std::max(0.0, best - order_score(b, gold));
  return r;
}

seq2seq::TrainResult train_pairwise(
    PairwiseModel& model, const text::Vocab& vocab,
    const std::vector<corruption::OrderingExample>& data,
    const seq2seq::TrainConfig& cfg, const seq2seq::StepCallback& on_step) {
  for (const auto& ex : data) {
    check_exact_size(ex.events.size());
    check_permutation(ex.gold, ex.events.size());
  }
  auto example_loss = [&](Tape<float>& t, std::size_t i,
                          Rng& rng) -> std::pair<double, std::optional<Var>> {
    const auto& ex = data[i];
    const int n = static_cast<int>(ex.events.size());
    RunOptions opt;
    opt.train = model.config().dropout > 0.0;
    opt.rng = &rng;
    const Var s = model.pair_scores(t, vocab, ex.events, opt);
    const Matrix<float>& sv = t.value(s);
    ScoreMatrix b = ScoreMatrix::Zero(n, n);
    const auto pairs = ordered_pairs(n);
    for (std::size_t k = 0; k < pairs.size(); ++k) {
      b(pairs[k].first, pairs[k].second) = sv(static_cast<Eigen::Index>(k), 0);
    }
    const HingeResult h = ssvm_loss(b, ex.gold);
    if (h.loss <= 0.0) return {0.0, std::nullopt};

    // d loss / d B[i][j] = [i before j in violator] - [i before j in gold].
    std::vector<int> rank_v(static_cast<std::size_t>(n)), rank_g(static_cast<std::size_t>(n));
    for (int r = 0; r < n; ++r) {
      rank_v[static_cast<std::size_t>(h.violator[static_cast<std::size_t>(r)])] = r;
      rank_g[static_cast<std::size_t>(ex.gold[static_cast<std::size_t>(r)])] = r;
    }
    Matrix<float> w(static_cast<Eigen::Index>(pairs.size()), 1);
    for (std::size_t k = 0; k < pairs.size(); ++k) {
      const auto [a, c] = pairs[k];
      const float in_v = rank_v[static_cast<std::size_t>(a)] < rank_v[static_cast<std::size_t>(c)] ? 1.f : 0.f;
      const float in_g = rank_g[static_cast<std::size_t>(a)] < rank_g[static_cast<std::size_t>(c)] ? 1.f : 0.f;
      w(static_cast<Eigen::Index>(k), 0) = in_v - in_g;
    }
    return {h.loss, t.weighted_sum(s, w)};
  };
  return run_training(model.params(), data.size(), cfg, example_loss, on_step);
}

// ---- pointer network --------------------------------------------------

PointerModel::PointerModel(const BaselineConfig& cfg)
    : PointerModel(cfg, seeded(cfg)) {}

PointerModel::PointerModel(const BaselineConfig& cfg, Rng rng)
    : cfg_(cfg), encoder_(params_, cfg, rng) {
  const int d = cfg.d_model;
  gates_ = nn::add_linear(params_, "pointer.gates", 2 * d, 4 * d, rng);
  query_ = nn::add_linear(params_, "pointer.query", d, d, rng);
  start_ = params_.add("pointer.start", 1, d);
  nn::init_normal(params_[start_].value, 1.0 / std::sqrt(double(d)), rng);
}

PointerModel::Cell PointerModel::lstm(Tape<float>& t, Var x, Var h, Var c) const {
  const Eigen::Index d = cfg_.d_model;
  const Var g = nn::linear(t, t.concat_cols({x, h}), gates_);
  const Var in = t.sigmoid(t.slice_cols(g, 0, d));
  const Var forget = t.sigmoid(t.slice_cols(g, d, d));
  const Var cand = t.tanh(t.slice_cols(g, 2 * d, d));
  const Var out = t.sigmoid(t.slice_cols(g, 3 * d, d));
  const Var c2 = t.add(t.hadamard(forget, c), t.hadamard(in, cand));
  return {t.hadamard(out, t.tanh(c2)), c2};
}

Var PointerModel::pointer_logits(Tape<float>& t, Var memory, Var h) const {
  return t.matmul_nt(nn::linear(t, h, query_), memory);
}

namespace {

Matrix<float> selection_mask(const std::vector<char>& selected) {
  Matrix<float> m = Matrix<float>::Zero(1, static_cast<Eigen::Index>(selected.size()));
  for (std::size_t i = 0; i < selected.size(); ++i) {
    if (selected[i]) m(0, static_cast<Eigen::Index>(i)) = -std::numeric_limits<float>::infinity();
  }
  return m;
}

}  // namespace

PointerModel::State PointerModel::begin(const text::Vocab& vocab,
                                        const std::vector<Event>& events) const {
  if (events.empty()) throw Error(ErrorCode::kInvalidArgument, "no events to order");
  Tape<float> t(params_, nullptr);
  const Var u = encoder_.encode(t, vocab, events, RunOptions{});
  State s;
  s.memory = t.value(u);
  s.h = s.memory.colwise().mean();
  s.c = Matrix<float>::Zero(1, cfg_.d_model);
  s.input = params_[start_].value;
  s.selected.assign(events.size(), 0);
  return s;
}

std::vector<double> PointerModel::step_distribution(const State& s) const {
  Tape<float> t(params_, nullptr);
  const Cell cell = lstm(t, t.constant(s.input), t.constant(s.h), t.constant(s.c));
  Matrix<float> logits = t.value(pointer_logits(t, t.constant(s.memory), cell.h));
  logits += selection_mask(s.selected);
  nn::softmax_rows_inplace(logits);
  std::vector<double> out(s.selected.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = logits(0, static_cast<Eigen::Index>(i));
  return out;
}

void PointerModel::advance(State& s, int chosen) const {
  if (chosen < 0 || static_cast<std::size_t>(chosen) >= s.selected.size() ||
      s.selected[static_cast<std::size_t>(chosen)]) {
    throw Error(ErrorCode::kInvalidArgument, "pointer choice is out of range or taken");
  }
  Tape<float> t(params_, nullptr);
  const Cell cell = lstm(t, t.constant(s.input), t.constant(s.h), t.constant(s.c));
  s.h = t.value(cell.h);
  s.c = t.value(cell.c);
  s.input = s.memory.row(chosen);
  s.selected[static_cast<std::size_t>(chosen)] = 1;
}

std::vector<int> PointerModel::decode(const text::Vocab& vocab,
                                      const std::vector<Event>& events) const {
  State s = begin(vocab, events);
  std::vector<int> order;
  for (std::size_t step = 0; step < events.size(); ++step) {
    const auto dist = step_distribution(s);
    int best = -1;
    for (std::size_t i = 0; i < dist.size(); ++i) {
      if (s.selected[i]) continue;
      if (best < 0 || dist[i] > dist[static_cast<std::size_t>(best)]) best = static_cast<int>(i);
    }
    order.push_back(best);
    advance(s, best);
  }
  return order;
}

Var PointerModel::sequence_loss(Tape<float>& t, const text::Vocab& vocab,
                                const std::vector<Event>& events,
                                const std::vector<int>& gold,
                                const RunOptions& opt) const {
  check_permutation(gold, events.size());
  const Var u = encoder_.encode(t, vocab, events, opt);
  Var h = t.mean_rows(u);
  Var c = t.constant(Matrix<float>::Zero(1, cfg_.d_model));
  Var x = t.param(start_);
  std::vector<char> selected(events.size(), 0);
  std::vector<Var> losses;
  for (int g : gold) {
    const Cell cell = lstm(t, x, h, c);
    h = cell.h;
    c = cell.c;
    const Matrix<float> mask = selection_mask(selected);
    const int target[1] = {g};
    losses.push_back(t.cross_entropy_sum(pointer_logits(t, u, h), target, -1, &mask));
    selected[static_cast<std::size_t>(g)] = 1;
    x = t.gather_rows(u, std::span<const int>(target, 1));
  }
  return t.sum(t.concat_rows(losses));
}

seq2seq::TrainResult train_pointer(
    PointerModel& model, const text::Vocab& vocab,
    const std::vector<corruption::OrderingExample>& data,
    const seq2seq::TrainConfig& cfg, const seq2seq::StepCallback& on_step) {
  for (const auto& ex : data) check_permutation(ex.gold, ex.events.size());
  auto example_loss = [&](Tape<float>& t, std::size_t i,
                          Rng& rng) -> std::pair<double, std::optional<Var>> {
    const auto& ex = data[i];
    RunOptions opt;
    opt.train = model.config().dropout > 0.0;
    opt.rng = &rng;
    const Var nll = model.sequence_loss(t, vocab, ex.events, ex.gold, opt);
    const Var per_step = t.scale(nll, 1.0f / static_cast<float>(ex.events.size()));
    return {t.scalar(per_step), per_step};
  };
  return run_training(model.params(), data.size(), cfg, example_loss, on_step);
}

// ---- checkpoints ------------------------------------------------------

void save_pairwise(const std::string& path, const PairwiseModel& model) {
  checkpoint::save(path, "pairwise", model.config().to_json(), model.params());
}

PairwiseModel load_pairwise(const std::string& path) {
  const auto header = checkpoint::read_header(path);
  PairwiseModel model(BaselineConfig::from_json(header.config));
  checkpoint::load_into(path, "pairwise", model.params());
  return model;
}

void save_pointer(const std::string& path, const PointerModel& model) {
  checkpoint::save(path, "pointer", model.config().to_json(), model.params());
}

PointerModel load_pointer(const std::string& path) {
  const auto header = checkpoint::read_header(path);
  PointerModel model(BaselineConfig::from_json(header.config));
  checkpoint::load_into(path, "pointer", model.params());
  return model;
}

}  // namespace tempo::baselines
