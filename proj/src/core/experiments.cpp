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

#include "experiments.hpp"

#include <cstdio>
#include <cstdlib>
#include <set>

#include "checkpoint.hpp"
#include "error.hpp"

#ifndef TEMPO_DATA_DIR
#define TEMPO_DATA_DIR "data"
#endif

namespace tempo::experiments {

using events::Event;
using events::EventSequence;
using nlohmann::json;
using nlohmann::ordered_json;

// ---- configuration ----------------------------------------------------

namespace {

ordered_json corruption_to_json(const corruption::CorruptionConfig& c) {
  ordered_json j;
  j["deletion_prob"] = c.deletion_prob;
  j["permutations_per_sequence"] = c.permutations_per_sequence;
  j["seed"] = c.seed;
  return j;
}

corruption::CorruptionConfig corruption_from_json(const json& j) {
  corruption::CorruptionConfig c;
  for (const auto& [key, value] : j.items()) {
    if (key == "deletion_prob") c.deletion_prob = value.get<double>();
    else if (key == "permutations_per_sequence") c.permutations_per_sequence = value.get<int>();
    else if (key == "seed") c.seed = value.get<std::uint64_t>();
    else throw Error(ErrorCode::kConfigParse, "unknown corruption key: " + key);
  }
  return c;
}

ordered_json scheme_to_json(const events::TagScheme& s) {
  ordered_json j;
  j["variant"] = events::scheme_name(s);
  j["max_index"] = s.max_index;
  return j;
}

events::TagScheme scheme_from_json(const json& j) {
  std::string variant = "indexed";
  int max_index = 16;
  for (const auto& [key, value] : j.items()) {
    if (key == "variant") variant = value.get<std::string>();
    else if (key == "max_index") max_index = value.get<int>();
    else throw Error(ErrorCode::kConfigParse, "unknown scheme key: " + key);
  }
  return events::parse_scheme(variant, max_index);
}

// Overlays `patch` onto `base`, rejecting keys the base does not have.
void overlay(ordered_json& base, const json& patch, const std::string& where) {
  if (!patch.is_object()) {
    throw Error(ErrorCode::kConfigParse, where + " must be a JSON object");
  }
  for (const auto& [key, value] : patch.items()) {
    if (!base.contains(key)) {
      throw Error(ErrorCode::kConfigParse, "unknown config key: " + where + "." + key);
    }
    if (base[key].is_object()) {
      overlay(base[key], value, where + "." + key);
    } else {
      base[key] = value;
    }
  }
}

}  // namespace

std::string default_data_dir() {
  if (const char* env = std::getenv("TEMPO_DATA_DIR"); env && *env) return env;
  return TEMPO_DATA_DIR;
}

RunConfig RunConfig::toy() {
  RunConfig c;
  c.paths.data_dir = default_data_dir();
  c.model.d_model = 64;
  c.model.n_heads = 4;
  c.model.n_enc_layers = 2;
  c.model.n_dec_layers = 2;
  c.model.d_ff = 256;
  c.model.dropout = 0.1;
  c.model.max_len = 128;
  c.train.learning_rate = 1e-3;
  c.train.warmup_steps = 200;
  c.train.batch_size = 32;
  c.train.epochs = 1;
  c.train.updates_per_epoch = 2000;
  c.decode.max_decode_len = 96;
  return c;
}

RunConfig RunConfig::paper() {
  RunConfig c = toy();
  c.preset = "paper";
  c.train.learning_rate = 1e-5;
  c.train.warmup_steps = 500;
  c.train.batch_size = 64;
  c.train.epochs = 10;
  c.train.updates_per_epoch = 2000;
  c.corruption.deletion_prob = 0.15;
  c.corruption.permutations_per_sequence = 2;
  c.decode.beam_size = 4;
  c.decode.nucleus_p = 0.8;
  return c;
}

RunConfig RunConfig::named_preset(const std::string& name) {
  if (name == "toy") return toy();
  if (name == "paper") return paper();
  throw Error(ErrorCode::kConfigParse, "unknown preset: " + name);
}

ordered_json RunConfig::to_json() const {
  ordered_json j;
  j["preset"] = preset;
  j["paths"] = {{"data_dir", paths.data_dir}, {"out_dir", paths.out_dir}};
  j["model"] = model.to_json();
  j["baseline"] = baseline.to_json();
  j["train"] = train.to_json();
  j["corruption"] = corruption_to_json(corruption);
  j["decode"] = decode.to_json();
  j["scheme"] = scheme_to_json(scheme);
  j["min_count"] = min_count;
  j["seed"] = seed;
  return j;
}

RunConfig RunConfig::from_json(const json& j) {
  if (!j.is_object()) throw Error(ErrorCode::kConfigParse, "run config must be a JSON object");
  const std::string preset_name = j.value("preset", std::string("toy"));
  ordered_json merged = named_preset(preset_name).to_json();
  try {
    overlay(merged, j, "config");
    RunConfig c;
    c.preset = merged.at("preset").get<std::string>();
    c.paths.data_dir = merged.at("paths").at("data_dir").get<std::string>();
    c.paths.out_dir = merged.at("paths").at("out_dir").get<std::string>();
    c.model = seq2seq::ModelConfig::from_json(merged.at("model"));
    c.baseline = baselines::BaselineConfig::from_json(merged.at("baseline"));
    c.train = seq2seq::TrainConfig::from_json(merged.at("train"));
    c.corruption = corruption_from_json(merged.at("corruption"));
    c.decode = decoding::DecodeConfig::from_json(merged.at("decode"));
    c.scheme = scheme_from_json(merged.at("scheme"));
    c.min_count = merged.at("min_count").get<int>();
    c.seed = merged.at("seed").get<std::uint64_t>();
    c.validate();
    return c;
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kConfigParse, std::string("run config: ") + e.what());
  }
}

void RunConfig::validate() const {
  train.validate();
  corruption.validate();
  decode.validate();
  if (min_count < 1) throw Error(ErrorCode::kInvalidArgument, "min_count must be >= 1");
  if (scheme.max_index < 1) throw Error(ErrorCode::kInvalidArgument, "max_index must be >= 1");
}

std::uint64_t fnv1a64(const std::string& bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

// The output directory names where a run lands, not what it computes.
std::string config_hash(const RunConfig& cfg) {
  auto j = cfg.to_json();
  j["paths"].erase("out_dir");
  return hex64(fnv1a64(j.dump()));
}

// ---- models -----------------------------------------------------------

std::string model_kind(const AnyModel& m) {
  switch (m.index()) {
    case 0: return "seq2seq";
    case 1: return "pairwise";
    default: return "pointer";
  }
}

AnyModel load_model(const std::string& path) {
  const auto header = checkpoint::read_header(path);
  if (header.kind == "seq2seq") return checkpoint::load_seq2seq(path);
  if (header.kind == "pairwise") return baselines::load_pairwise(path);
  if (header.kind == "pointer") return baselines::load_pointer(path);
  throw Error(ErrorCode::kParse, "unknown checkpoint kind '" + header.kind + "' in " + path);
}

void save_model(const std::string& path, const AnyModel& m) {
  std::visit(
      [&](const auto& model) {
        using M = std::decay_t<decltype(model)>;
        if constexpr (std::is_same_v<M, seq2seq::Seq2SeqModel<float>>) {
          checkpoint::save_seq2seq(path, model);
        } else if constexpr (std::is_same_v<M, baselines::PairwiseModel>) {
          baselines::save_pairwise(path, model);
        } else {
          baselines::save_pointer(path, model);
        }
      },
      m);
}

text::Vocab build_corpus_vocab(const std::vector<EventSequence>& corpus, const RunConfig& cfg) {
  const events::TagScheme plain{events::TagVariant::kPlain, cfg.scheme.max_index};
  std::vector<std::string> texts;
  texts.reserve(corpus.size());
  for (const auto& seq : corpus) texts.push_back(events::render_input(seq.events, plain).text);
  return text::build_vocab(texts, cfg.min_count, cfg.scheme.max_index, true);
}

seq2seq::Seq2SeqModel<float> new_seq2seq(const RunConfig& cfg, const text::Vocab& vocab) {
  seq2seq::ModelConfig mc = cfg.model;
  mc.vocab_size = vocab.size();
  return seq2seq::Seq2SeqModel<float>(mc);
}

AnyModel new_model(const std::string& kind, const RunConfig& cfg, const text::Vocab& vocab) {
  if (kind == "seq2seq") return new_seq2seq(cfg, vocab);
  baselines::BaselineConfig bc = cfg.baseline;
  bc.vocab_size = vocab.size();
  if (kind == "pairwise") return baselines::PairwiseModel(bc);
  if (kind == "pointer") return baselines::PointerModel(bc);
  throw Error(ErrorCode::kInvalidArgument, "unknown model kind: " + kind);
}

seq2seq::TrainResult train_model(AnyModel& model, const text::Vocab& vocab,
                                 const std::vector<EventSequence>& corpus,
                                 const RunConfig& cfg, const seq2seq::StepCallback& on_step) {
  if (auto* s2s = std::get_if<seq2seq::Seq2SeqModel<float>>(&model)) {
    const auto examples = corruption::make_training_set(corpus, cfg.corruption);
    std::vector<seq2seq::EncodedPair> data;
    data.reserve(examples.size());
    for (const auto& ex : examples) data.push_back(decoding::encode_example(ex, cfg.scheme, vocab));
    return seq2seq::train(*s2s, data, cfg.train, on_step);
  }
  const auto data = corruption::make_ordering_set(
      corpus, cfg.corruption.permutations_per_sequence, cfg.corruption.seed);
  if (auto* pw = std::get_if<baselines::PairwiseModel>(&model)) {
    return baselines::train_pairwise(*pw, vocab, data, cfg.train, on_step);
  }
  return baselines::train_pointer(std::get<baselines::PointerModel>(model), vocab, data,
                                  cfg.train, on_step);
}

OrderingMode parse_ordering_mode(const std::string& name) {
  if (name == "generate") return OrderingMode::kGenerate;
  if (name == "score-gen") return OrderingMode::kScoreGen;
  if (name == "score-tag") return OrderingMode::kScoreTag;
  throw Error(ErrorCode::kInvalidArgument, "unknown ordering mode: " + name);
}

std::string ordering_mode_name(OrderingMode mode) {
  switch (mode) {
    case OrderingMode::kGenerate: return "generate";
    case OrderingMode::kScoreGen: return "score-gen";
    case OrderingMode::kScoreTag: return "score-tag";
  }
  return "generate";
}

eval::Orderer make_orderer(const AnyModel& model, const text::Vocab& vocab,
                           const RunConfig& cfg, OrderingMode mode) {
  if (const auto* s2s = std::get_if<seq2seq::Seq2SeqModel<float>>(&model)) {
    const auto scheme = cfg.scheme;
    const auto decode = cfg.decode;
    if (mode == OrderingMode::kGenerate) {
      return [s2s, &vocab, scheme, decode](const std::vector<Event>& in) {
        return decoding::order_events(*s2s, vocab, in, scheme, decode).order;
      };
    }
    const auto score = mode == OrderingMode::kScoreGen ? decoding::ScoreMode::kGen
                                                       : decoding::ScoreMode::kTag;
    return [s2s, &vocab, scheme, score](const std::vector<Event>& in) {
      return decoding::order_by_scoring(*s2s, vocab, in, scheme, score).order;
    };
  }
  if (const auto* pw = std::get_if<baselines::PairwiseModel>(&model)) {
    return [pw, &vocab](const std::vector<Event>& in) {
      return baselines::global_decode(pw->scores(vocab, in));
    };
  }
  const auto* ptr = &std::get<baselines::PointerModel>(model);
  return [ptr, &vocab](const std::vector<Event>& in) { return ptr->decode(vocab, in); };
}

eval::InsertionRanker make_ranker(const AnyModel& model, const text::Vocab& vocab,
                                  const RunConfig& cfg, decoding::ScoreMode mode) {
  const auto* s2s = std::get_if<seq2seq::Seq2SeqModel<float>>(&model);
  if (!s2s) {
    throw Error(ErrorCode::kInvalidArgument,
                "insertion ranking needs a seq2seq model, got " + model_kind(model));
  }
  const auto scheme = cfg.scheme;
  return [s2s, &vocab, scheme, mode](const eval::InsertionCase& c) {
    return decoding::rank_insertions(*s2s, vocab, c.seed_events, c.new_event, scheme, mode)
        .ranked_positions;
  };
}

// ---- drivers ----------------------------------------------------------

nlohmann::ordered_json grad_check_report(const RunConfig& cfg) {
  EventSequence seq;
  seq.events = {Event::from_roles({{"ARG0", "she"}, {"V", "baked"}, {"ARG1", "bread"}}),
                Event::from_roles({{"ARG0", "she"}, {"V", "sold"}, {"ARG1", "the bread"}}),
                Event::from_roles({{"ARG0", "she"}, {"V", "counted"}, {"ARG1", "coins"}})};
  corruption::CorruptionConfig cc = cfg.corruption;
  Rng rng(derive_seed(cfg.seed, 7));
  const auto ex = corruption::corrupt(seq, cc, rng);
  const auto vocab = build_corpus_vocab({seq}, cfg);
  const auto pair = decoding::encode_example(ex, cfg.scheme, vocab);

  seq2seq::ModelConfig mc;
  mc.vocab_size = vocab.size();
  mc.d_model = 8;
  mc.n_heads = 2;
  mc.n_enc_layers = 1;
  mc.n_dec_layers = 1;
  mc.d_ff = 16;
  mc.dropout = 0.0;
  mc.max_len = 64;
  mc.seed = cfg.seed;
  seq2seq::Seq2SeqModel<double> model(mc);
  const auto r = seq2seq::grad_check(model, pair);

  ordered_json j;
  j["task"] = "grad_check";
  j["precision"] = "double";
  j["model"] = mc.to_json();
  j["parameters_checked"] = r.checked;
  j["max_relative_error"] = r.max_relative_error;
  j["worst_parameter"] = r.worst_parameter;
  j["threshold"] = 1e-4;
  j["passed"] = r.max_relative_error < 1e-4;
  return j;
}

nlohmann::ordered_json TimexProbeOptions::to_json() const {
  ordered_json j;
  j["kind"] = datasets::timex_kind_name(kind);
  j["train_sequences"] = train_sequences;
  j["eval_examples"] = eval_examples;
  j["events_per_sequence"] = events_per_sequence;
  j["held_out_years"] = {held_out_years.first, held_out_years.second};
  j["window_prob"] = window_prob;
  j["window_width"] = window_width;
  return j;
}

ProbeResult timex_probe(const RunConfig& cfg, const TimexProbeOptions& opt,
                        const AnyModel* trained, const text::Vocab* trained_vocab,
                        const seq2seq::StepCallback& on_step) {
  if ((trained == nullptr) != (trained_vocab == nullptr)) {
    throw Error(ErrorCode::kInvalidArgument, "a trained model needs its vocabulary");
  }
  const bool years = opt.kind == datasets::TimexKind::kYear;
  ProbeResult out;
  std::optional<AnyModel> fresh;
  std::optional<text::Vocab> fresh_vocab;
  if (!trained) {
    datasets::TimexSpec train_spec;
    train_spec.kind = opt.kind;
    if (years) {
      train_spec.excluded_years = opt.held_out_years;
      train_spec.window_prob = opt.window_prob;
      train_spec.window_width = opt.window_width;
    }
    const auto corpus = datasets::gen_timex_corpus(train_spec, opt.train_sequences,
                                                   opt.events_per_sequence,
                                                   derive_seed(cfg.seed, 1));
    fresh_vocab = build_corpus_vocab(corpus, cfg);
    fresh = new_seq2seq(cfg, *fresh_vocab);
    out.loss_curve = train_model(*fresh, *fresh_vocab, corpus, cfg, on_step).loss_curve;
    trained = &*fresh;
    trained_vocab = &*fresh_vocab;
  }

  datasets::TimexSpec eval_spec;
  eval_spec.kind = opt.kind;
  if (years) {
    eval_spec.year_min = opt.held_out_years.first;
    eval_spec.year_max = opt.held_out_years.second;
  }
  const auto held = datasets::gen_timex_corpus(eval_spec, opt.eval_examples,
                                               opt.events_per_sequence, derive_seed(cfg.seed, 2));
  out.eval_set = corruption::make_ordering_set(held, 1, derive_seed(cfg.seed, 3));
  out.evaluation = eval::evaluate_ordering(make_orderer(*trained, *trained_vocab, cfg),
                                           out.eval_set, "timex_" + datasets::timex_kind_name(opt.kind));
  auto& d = out.evaluation.report.details;
  d["probe"] = opt.to_json();
  d["model_kind"] = model_kind(*trained);
  double perms = 1;
  for (int k = 2; k <= opt.events_per_sequence; ++k) perms *= k;
  d["random_pairwise_accuracy"] = 0.5;
  d["random_exact_match"] = 1.0 / perms;
  return out;
}

SchemaSplit schema_split(const std::vector<datasets::ScenarioSchema>& schemas, int n_train,
                         int n_held_out, std::uint64_t seed, double drop_prob) {
  SchemaSplit split;
  datasets::SchemaSampling sampling;
  sampling.drop_prob = drop_prob;
  split.train = datasets::gen_schema_corpus(schemas, n_train, derive_seed(seed, 10), sampling);

  const events::TagScheme plain{events::TagVariant::kPlain};
  std::set<std::string> seen;
  for (const auto& s : split.train) seen.insert(events::render_input(s.events, plain).text);
  // Held-out sequences never repeat a training sequence verbatim.
  const int batch = std::max(n_held_out, 1) * 4;
  for (std::uint64_t round = 0; static_cast<int>(split.held_out.size()) < n_held_out && round < 16;
       ++round) {
    for (auto& s : datasets::gen_schema_corpus(schemas, batch, derive_seed(seed, 11 + round))) {
      if (static_cast<int>(split.held_out.size()) == n_held_out) break;
      if (!seen.insert(events::render_input(s.events, plain).text).second) continue;
      s.source_id = "held-" + s.source_id;
      split.held_out.push_back(std::move(s));
    }
  }
  if (static_cast<int>(split.held_out.size()) < n_held_out) {
    throw Error(ErrorCode::kInvalidArgument,
                "schemas are too small to draw " + std::to_string(n_held_out) +
                    " unseen held-out sequences");
  }
  return split;
}

std::vector<eval::ScalingPoint> scaling_curve(const RunConfig& cfg,
                                              const std::vector<datasets::ScenarioSchema>& schemas,
                                              const ScalingOptions& opt,
                                              const seq2seq::StepCallback& on_step) {
  if (opt.sizes.empty()) throw Error(ErrorCode::kInvalidArgument, "no corpus sizes given");
  const int largest = *std::max_element(opt.sizes.begin(), opt.sizes.end());
  const auto full = schema_split(schemas, largest, opt.held_out, cfg.seed);
  const auto vocab = build_corpus_vocab(full.train, cfg);
  const auto eval_set = corruption::make_ordering_set(full.held_out, 2, derive_seed(cfg.seed, 20));
  const auto cases = eval::make_insertion_cases(full.held_out, derive_seed(cfg.seed, 21));

  std::vector<eval::ScalingPoint> points;
  for (int n : opt.sizes) {
    std::vector<EventSequence> corpus(full.train.begin(), full.train.begin() + n);
    AnyModel model = new_seq2seq(cfg, vocab);
    const auto tr = train_model(model, vocab, corpus, cfg, on_step);
    const auto ord = eval::evaluate_ordering(make_orderer(model, vocab, cfg), eval_set);
    const auto ins = eval::evaluate_insertion(make_ranker(model, vocab, cfg), cases);
    eval::ScalingPoint p;
    p.n_sequences = n;
    p.pairwise_accuracy = ord.report.pairwise_accuracy.value_or(0.0);
    p.exact_match = ord.report.exact_match.value_or(0.0);
    p.insertion_em = ins.report.exact_match.value_or(0.0);
    p.final_loss = tr.loss_curve.empty() ? 0.0 : tr.loss_curve.back();
    points.push_back(p);
  }
  return points;
}

std::vector<AblationArm> deletion_ablation(const RunConfig& cfg,
                                           const std::vector<datasets::ScenarioSchema>& schemas,
                                           int n_train, int n_held_out,
                                           const std::vector<double>& deletion_probs,
                                           const seq2seq::StepCallback& on_step) {
  const auto split = schema_split(schemas, n_train, n_held_out, cfg.seed);
  const auto shared_vocab = std::make_shared<const text::Vocab>(build_corpus_vocab(split.train, cfg));
  const auto& vocab = *shared_vocab;
  const auto cases = eval::make_insertion_cases(split.held_out, derive_seed(cfg.seed, 21));
  std::vector<AblationArm> arms;
  for (double p : deletion_probs) {
    RunConfig arm_cfg = cfg;
    arm_cfg.corruption.deletion_prob = p;
    AnyModel model = new_seq2seq(arm_cfg, vocab);
    AblationArm arm;
    arm.deletion_prob = p;
    arm.loss_curve = train_model(model, vocab, split.train, arm_cfg, on_step).loss_curve;
    arm.by_gen = eval::evaluate_insertion(make_ranker(model, vocab, arm_cfg), cases);
    if (arm_cfg.scheme.variant == events::TagVariant::kIndexed) {
      arm.by_tag = eval::evaluate_insertion(
          make_ranker(model, vocab, arm_cfg, decoding::ScoreMode::kTag), cases);
    }
    arm.model = std::make_shared<const AnyModel>(std::move(model));
    arm.vocab = shared_vocab;
    arms.push_back(std::move(arm));
  }
  return arms;
}

}  // namespace tempo::experiments
