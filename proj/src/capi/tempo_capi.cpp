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

#include "tempo/tempo.h"

#include <cstdlib>
#include <cstring>
#include <new>
#include <string>

#include "core/error.hpp"
#include "core/experiments.hpp"

struct tempo_config {
  tempo::experiments::RunConfig cfg;
};

struct tempo_vocab {
  tempo::text::Vocab vocab;
};

struct tempo_model {
  tempo::experiments::AnyModel model;
  std::string kind;
};

namespace {

using nlohmann::json;
using nlohmann::ordered_json;
using tempo::Error;
using tempo::ErrorCode;
namespace ex = tempo::experiments;

thread_local std::string g_last_error;

tempo_status to_status(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidArgument: return TEMPO_ERR_INVALID_ARGUMENT;
    case ErrorCode::kConfigParse: return TEMPO_ERR_CONFIG_PARSE;
    case ErrorCode::kMissingFile: return TEMPO_ERR_MISSING_FILE;
    case ErrorCode::kShapeMismatch: return TEMPO_ERR_SHAPE_MISMATCH;
    case ErrorCode::kSizeLimit: return TEMPO_ERR_SIZE_LIMIT;
    case ErrorCode::kNumeric: return TEMPO_ERR_NUMERIC;
    case ErrorCode::kParse: return TEMPO_ERR_PARSE;
    case ErrorCode::kCycle: return TEMPO_ERR_CYCLE;
    case ErrorCode::kIo: return TEMPO_ERR_IO;
    case ErrorCode::kInternal: return TEMPO_ERR_INTERNAL;
  }
  return TEMPO_ERR_INTERNAL;
}

template <typename F>
tempo_status guarded(F&& body) {
  g_last_error.clear();
  try {
    body();
    return TEMPO_OK;
  } catch (const Error& e) {
    g_last_error = e.what();
    return to_status(e.code());
  } catch (const json::exception& e) {
    g_last_error = std::string("malformed JSON: ") + e.what();
    return TEMPO_ERR_PARSE;
  } catch (const std::bad_alloc&) {
    g_last_error = "out of memory";
    return TEMPO_ERR_INTERNAL;
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return TEMPO_ERR_INTERNAL;
  }
}

void require(bool ok, const char* what) {
  if (!ok) throw Error(ErrorCode::kInvalidArgument, what);
}

char* copy_out(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (!out) throw std::bad_alloc();
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

void emit(const ordered_json& j, char** out) {
  require(out != nullptr, "output pointer is null");
  *out = copy_out(j.dump());
}

json parse_json(const char* text, const char* what) {
  if (!text || !*text) return json::object();
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::kParse, std::string(what) + ": " + e.what());
  }
}

std::vector<tempo::events::Event> events_from(const json& arr) {
  require(arr.is_array(), "events must be a JSON array");
  std::vector<tempo::events::Event> out;
  for (const auto& e : arr) out.push_back(tempo::events::event_from_json(e));
  return out;
}

const tempo::seq2seq::Seq2SeqModel<float>& seq2seq_of(const tempo_model* m) {
  const auto* s = std::get_if<tempo::seq2seq::Seq2SeqModel<float>>(&m->model);
  if (!s) {
    throw Error(ErrorCode::kInvalidArgument,
                "this operation needs a seq2seq model, got " + m->kind);
  }
  return *s;
}

std::string data_file(const ex::RunConfig& cfg, const char* given, const char* name) {
  if (given && *given) return given;
  return cfg.paths.data_dir + "/" + name;
}

tempo::seq2seq::StepCallback progress_callback(tempo_progress_fn fn, void* user) {
  if (!fn) return {};
  return [fn, user](int step, double loss, double lr) { fn(step, loss, lr, user); };
}

std::vector<tempo::events::EventSequence> read_corpus(const ex::RunConfig& cfg,
                                                      const char* path) {
  require(path && *path, "corpus path is empty");
  const auto stop = tempo::events::load_stopwords(cfg.paths.data_dir + "/stopwords.txt");
  return tempo::events::load_sequences(path, stop);
}

ordered_json doubles(const std::vector<double>& v) {
  ordered_json a = ordered_json::array();
  for (double x : v) a.push_back(x);
  return a;
}

}  // namespace

extern "C" {

const char* tempo_version(void) { return "0.1.0"; }

const char* tempo_status_name(tempo_status status) {
  switch (status) {
    case TEMPO_OK: return "ok";
    case TEMPO_ERR_INVALID_ARGUMENT: return "invalid-argument";
    case TEMPO_ERR_CONFIG_PARSE: return "config-parse";
    case TEMPO_ERR_MISSING_FILE: return "missing-file";
    case TEMPO_ERR_SHAPE_MISMATCH: return "shape-mismatch";
    case TEMPO_ERR_SIZE_LIMIT: return "size-limit";
    case TEMPO_ERR_NUMERIC: return "numeric";
    case TEMPO_ERR_PARSE: return "parse";
    case TEMPO_ERR_CYCLE: return "cycle";
    case TEMPO_ERR_IO: return "io";
    case TEMPO_ERR_INTERNAL: return "internal";
  }
  return "unknown";
}

const char* tempo_last_error(void) { return g_last_error.c_str(); }

void tempo_string_free(char* s) { std::free(s); }

// ---- configuration ----------------------------------------------------

tempo_status tempo_config_parse(const char* text, tempo_config** out) {
  return guarded([&] {
    require(out != nullptr, "output pointer is null");
    json j;
    try {
      j = (text && *text) ? json::parse(text) : json::object();
    } catch (const json::parse_error& e) {
      throw Error(ErrorCode::kConfigParse, std::string("config is not JSON: ") + e.what());
    }
    *out = new tempo_config{ex::RunConfig::from_json(j)};
  });
}

tempo_status tempo_config_to_json(const tempo_config* cfg, char** out_json) {
  return guarded([&] {
    require(cfg != nullptr, "config is null");
    emit(cfg->cfg.to_json(), out_json);
  });
}

tempo_status tempo_config_hash(const tempo_config* cfg, char** out_hex) {
  return guarded([&] {
    require(cfg != nullptr && out_hex != nullptr, "null argument");
    *out_hex = copy_out(ex::config_hash(cfg->cfg));
  });
}

void tempo_config_free(tempo_config* cfg) { delete cfg; }

// ---- data -------------------------------------------------------------

tempo_status tempo_generate_corpus(const tempo_config* c, const char* request_json,
                                   const char* out_path, char** summary_json) {
  return guarded([&] {
    require(c != nullptr, "config is null");
    require(out_path && *out_path, "output path is empty");
    const auto& cfg = c->cfg;
    const json req = parse_json(request_json, "data request");
    const std::string source = req.value("source", std::string("schema"));
    const std::uint64_t seed = req.value("seed", cfg.seed);
    const std::string split = req.value("split", std::string("train"));
    require(split == "train" || split == "eval", "split must be train or eval");
    std::vector<tempo::events::EventSequence> corpus;

    if (source == "schema") {
      const auto schemas = tempo::datasets::load_schemas(
          req.value("schemas", cfg.paths.data_dir + "/schemas.txt"));
      const int n = req.value("n", 2000);
      const int train_n = req.value("train_n", n);
      const auto s = ex::schema_split(schemas, split == "train" ? n : train_n,
                                      split == "eval" ? n : 0, seed,
                                      req.value("drop_prob", 0.0));
      corpus = split == "train" ? s.train : s.held_out;
    } else if (source == "timex") {
      tempo::datasets::TimexSpec spec;
      spec.kind = tempo::datasets::parse_timex_kind(req.value("kind", std::string("year")));
      const ex::TimexProbeOptions probe;
      const auto held = req.value(
          "held_out_years", std::vector<int>{probe.held_out_years.first, probe.held_out_years.second});
      require(held.size() == 2, "held_out_years needs two values");
      if (spec.kind == tempo::datasets::TimexKind::kYear) {
        if (split == "train") {
          spec.excluded_years = std::make_pair(held[0], held[1]);
          spec.window_prob = req.value("window_prob", probe.window_prob);
          spec.window_width = probe.window_width;
        } else {
          spec.year_min = held[0];
          spec.year_max = held[1];
        }
      }
      corpus = tempo::datasets::gen_timex_corpus(spec, req.value("n", 100),
                                                 req.value("events_per_sequence", 3), seed);
    } else if (source == "dag") {
      const std::string input = req.at("input").get<std::string>();
      for (const auto& rec : tempo::events::read_jsonl(input)) {
        const auto evs = events_from(rec.at("events"));
        std::vector<tempo::datasets::Relation> rels;
        for (const auto& r : rec.at("relations")) {
          rels.push_back({r.at(0).get<int>(), r.at(1).get<int>(), r.at(2).get<std::string>()});
        }
        for (auto& s : tempo::datasets::dag_to_sequences(evs, rels, rec.value("id", std::string("dag")))) {
          corpus.push_back(std::move(s));
        }
      }
    } else if (source == "documents") {
      corpus = read_corpus(cfg, req.at("input").get<std::string>().c_str());
    } else {
      throw Error(ErrorCode::kInvalidArgument, "unknown data source: " + source);
    }

    std::vector<ordered_json> records;
    std::size_t n_events = 0;
    for (const auto& s : corpus) {
      records.push_back(tempo::events::sequence_to_json(s));
      n_events += s.events.size();
    }
    tempo::events::write_jsonl(out_path, records);
    ordered_json summary;
    summary["source"] = source;
    summary["split"] = split;
    summary["sequences"] = corpus.size();
    summary["events"] = n_events;
    summary["seed"] = seed;
    emit(summary, summary_json);
  });
}

// ---- vocabulary -------------------------------------------------------

tempo_status tempo_vocab_build(const tempo_config* c, const char* corpus_path,
                               tempo_vocab** out) {
  return guarded([&] {
    require(c != nullptr && out != nullptr, "null argument");
    *out = new tempo_vocab{ex::build_corpus_vocab(read_corpus(c->cfg, corpus_path), c->cfg)};
  });
}

tempo_status tempo_vocab_load(const char* path, tempo_vocab** out) {
  return guarded([&] {
    require(path && out, "null argument");
    *out = new tempo_vocab{tempo::text::Vocab::load(path)};
  });
}

tempo_status tempo_vocab_save(const tempo_vocab* vocab, const char* path) {
  return guarded([&] {
    require(vocab && path, "null argument");
    vocab->vocab.save(path);
  });
}

int tempo_vocab_size(const tempo_vocab* vocab) { return vocab ? vocab->vocab.size() : 0; }

void tempo_vocab_free(tempo_vocab* vocab) { delete vocab; }

// ---- models -----------------------------------------------------------

tempo_status tempo_model_create(const tempo_config* c, const char* kind,
                                const tempo_vocab* vocab, tempo_model** out) {
  return guarded([&] {
    require(c && kind && vocab && out, "null argument");
    auto m = ex::new_model(kind, c->cfg, vocab->vocab);
    *out = new tempo_model{std::move(m), kind};
  });
}

tempo_status tempo_model_load(const char* path, tempo_model** out) {
  return guarded([&] {
    require(path && out, "null argument");
    auto m = ex::load_model(path);
    const std::string kind = ex::model_kind(m);
    *out = new tempo_model{std::move(m), kind};
  });
}

tempo_status tempo_model_save(const tempo_model* model, const char* path) {
  return guarded([&] {
    require(model && path, "null argument");
    ex::save_model(path, model->model);
  });
}

const char* tempo_model_kind(const tempo_model* model) {
  return model ? model->kind.c_str() : "";
}

void tempo_model_free(tempo_model* model) { delete model; }

tempo_status tempo_model_train(tempo_model* model, const tempo_vocab* vocab,
                               const tempo_config* c, const char* corpus_path,
                               tempo_progress_fn progress, void* user_data,
                               char** result_json) {
  return guarded([&] {
    require(model && vocab && c, "null argument");
    const auto corpus = read_corpus(c->cfg, corpus_path);
    const auto r = ex::train_model(model->model, vocab->vocab, corpus, c->cfg,
                                   progress_callback(progress, user_data));
    ordered_json j;
    j["kind"] = model->kind;
    j["sequences"] = corpus.size();
    j["steps"] = r.loss_curve.size();
    j["final_loss"] = r.loss_curve.empty() ? 0.0 : r.loss_curve.back();
    j["train"] = c->cfg.train.to_json();
    j["loss_curve"] = doubles(r.loss_curve);
    emit(j, result_json);
  });
}

// ---- inference --------------------------------------------------------

tempo_status tempo_order(const tempo_model* model, const tempo_vocab* vocab,
                         const tempo_config* c, const char* events_json, const char* mode,
                         char** result_json) {
  return guarded([&] {
    require(model && vocab && c, "null argument");
    const auto input = events_from(parse_json(events_json, "events"));
    const auto m = ex::parse_ordering_mode(mode && *mode ? mode : "generate");
    ordered_json j;
    std::vector<int> order;
    if (m == ex::OrderingMode::kGenerate && model->kind == "seq2seq") {
      const auto p = tempo::decoding::order_events(seq2seq_of(model), vocab->vocab, input,
                                                   c->cfg.scheme, c->cfg.decode);
      order = p.order;
      j["raw_generated"] = p.raw_generated;
    } else {
      order = ex::make_orderer(model->model, vocab->vocab, c->cfg, m)(input);
    }
    j["order"] = order;
    ordered_json ordered = ordered_json::array();
    for (int i : order) ordered.push_back(tempo::events::render_event(input[static_cast<std::size_t>(i)]));
    j["events"] = ordered;
    emit(j, result_json);
  });
}

tempo_status tempo_infill(const tempo_model* model, const tempo_vocab* vocab,
                          const tempo_config* c, const char* query_json, char** result_json) {
  return guarded([&] {
    require(model && vocab && c, "null argument");
    const json q = parse_json(query_json, "infill query");
    tempo::decoding::InfillQuery query;
    query.seed_events = events_from(q.at("events"));
    query.position = q.at("position").get<int>();
    auto dc = c->cfg.decode;
    dc.seed = q.value("seed", dc.seed);
    const auto r = tempo::decoding::infill(seq2seq_of(model), vocab->vocab, query,
                                           c->cfg.scheme, dc);
    ordered_json j;
    j["event"] = tempo::events::event_to_json(r.event);
    j["text"] = tempo::events::render_event(r.event);
    j["raw_generated"] = r.raw_generated;
    j["banned_token_ids"] = std::vector<int>(r.banned.begin(), r.banned.end());
    emit(j, result_json);
  });
}

tempo_status tempo_rank_insert(const tempo_model* model, const tempo_vocab* vocab,
                               const tempo_config* c, const char* query_json,
                               char** result_json) {
  return guarded([&] {
    require(model && vocab && c, "null argument");
    const json q = parse_json(query_json, "insertion query");
    const auto seeds = events_from(q.at("events"));
    const auto fresh = tempo::events::event_from_json(q.at("new_event"));
    const std::string score = q.value("score", std::string("gen"));
    require(score == "gen" || score == "tag", "score must be gen or tag");
    const auto r = tempo::decoding::rank_insertions(
        seq2seq_of(model), vocab->vocab, seeds, fresh, c->cfg.scheme,
        score == "gen" ? tempo::decoding::ScoreMode::kGen : tempo::decoding::ScoreMode::kTag);
    ordered_json j;
    j["ranked_positions"] = r.ranked_positions;
    j["gen_scores"] = doubles(r.gen_scores);
    if (!r.tag_scores.empty()) j["tag_scores"] = doubles(r.tag_scores);
    if (q.contains("gold_position")) {
      const auto hit = tempo::eval::ranking_em(q.at("gold_position").get<int>(), r.ranked_positions, 2);
      j["top1"] = hit.top1;
      j["top2"] = hit.topk;
    }
    emit(j, result_json);
  });
}

// ---- evaluation -------------------------------------------------------

tempo_status tempo_eval_ordering(const tempo_model* model, const tempo_vocab* vocab,
                                 const tempo_config* c, const char* eval_path,
                                 const char* mode, char** result_json) {
  return guarded([&] {
    require(model && vocab && c, "null argument");
    const auto seqs = read_corpus(c->cfg, eval_path);
    const auto set = tempo::corruption::make_ordering_set(
        seqs, 2, tempo::derive_seed(c->cfg.seed, 30));
    const auto m = ex::parse_ordering_mode(mode && *mode ? mode : "generate");
    const auto ev = tempo::eval::evaluate_ordering(
        ex::make_orderer(model->model, vocab->vocab, c->cfg, m), set);
    ordered_json j;
    j["report"] = ev.report.to_json();
    j["report"]["details"]["model_kind"] = model->kind;
    j["report"]["details"]["ordering_mode"] = ex::ordering_mode_name(m);
    auto& preds = j["predictions"] = ordered_json::array();
    for (std::size_t i = 0; i < set.size(); ++i) {
      ordered_json row;
      row["id"] = set[i].source_id;
      row["gold"] = set[i].gold;
      if (ev.predictions[i]) row["pred"] = *ev.predictions[i];
      else row["pred"] = nullptr;
      preds.push_back(row);
    }
    emit(j, result_json);
  });
}

tempo_status tempo_eval_insertion(const tempo_model* model, const tempo_vocab* vocab,
                                  const tempo_config* c, const char* eval_path,
                                  const char* score, char** result_json) {
  return guarded([&] {
    require(model && vocab && c, "null argument");
    const std::string s = score && *score ? score : "gen";
    require(s == "gen" || s == "tag", "score must be gen or tag");
    const auto cases = tempo::eval::make_insertion_cases(read_corpus(c->cfg, eval_path),
                                                         tempo::derive_seed(c->cfg.seed, 31));
    const auto ev = tempo::eval::evaluate_insertion(
        ex::make_ranker(model->model, vocab->vocab, c->cfg,
                        s == "gen" ? tempo::decoding::ScoreMode::kGen
                                   : tempo::decoding::ScoreMode::kTag),
        cases);
    ordered_json j;
    j["report"] = ev.report.to_json();
    j["report"]["details"]["score"] = s;
    j["report"]["details"]["random_exact_match"] = [&] {
      double acc = 0;
      for (const auto& cs : cases) acc += 1.0 / static_cast<double>(cs.seed_events.size() + 1);
      return cases.empty() ? 0.0 : acc / static_cast<double>(cases.size());
    }();
    auto& preds = j["predictions"] = ordered_json::array();
    for (std::size_t i = 0; i < cases.size(); ++i) {
      preds.push_back({{"gold_position", cases[i].gold_position}, {"ranked", ev.rankings[i]}});
    }
    emit(j, result_json);
  });
}

tempo_status tempo_eval_mctaco(const tempo_model* model, const tempo_vocab* vocab,
                               const tempo_config* c, const char* fixture_path,
                               const char* templates_path, const char* mode,
                               char** result_json) {
  return guarded([&] {
    require(model && vocab && c, "null argument");
    const auto examples = tempo::datasets::load_mctaco(
        data_file(c->cfg, fixture_path, "mctaco_fixture.jsonl"));
    const auto templates = tempo::datasets::load_templates(
        data_file(c->cfg, templates_path, "mctaco_templates.txt"));
    const auto m = ex::parse_ordering_mode(mode && *mode ? mode : "generate");
    const auto ev = tempo::eval::evaluate_before_after(
        ex::make_orderer(model->model, vocab->vocab, c->cfg, m), examples, templates);
    const auto ta = tempo::eval::template_accuracy(examples, templates);
    ordered_json j;
    j["report"] = ev.report.to_json();
    j["report"]["details"]["ordering_mode"] = ex::ordering_mode_name(m);
    j["template_accuracy"] = {{"labeled", ta.n}, {"parsed", ta.parsed},
                              {"correct", ta.correct}, {"accuracy", ta.accuracy()}};
    j["predictions"] = ev.predictions;
    emit(j, result_json);
  });
}

// ---- experiments ------------------------------------------------------

tempo_status tempo_grad_check(const tempo_config* c, char** result_json) {
  return guarded([&] {
    require(c != nullptr, "config is null");
    emit(ex::grad_check_report(c->cfg), result_json);
  });
}

tempo_status tempo_timex_probe(const tempo_model* model, const tempo_vocab* vocab,
                               const tempo_config* c, const char* options_json,
                               tempo_progress_fn progress, void* user_data,
                               char** result_json) {
  return guarded([&] {
    require(c != nullptr, "config is null");
    require((model == nullptr) == (vocab == nullptr), "model and vocab go together");
    const json o = parse_json(options_json, "probe options");
    ex::TimexProbeOptions opt;
    for (const auto& [key, value] : o.items()) {
      if (key == "kind") opt.kind = tempo::datasets::parse_timex_kind(value.get<std::string>());
      else if (key == "train_sequences") opt.train_sequences = value.get<int>();
      else if (key == "eval_examples") opt.eval_examples = value.get<int>();
      else if (key == "events_per_sequence") opt.events_per_sequence = value.get<int>();
      else if (key == "held_out_years") {
        const auto v = value.get<std::vector<int>>();
        require(v.size() == 2, "held_out_years needs two values");
        opt.held_out_years = {v[0], v[1]};
      } else if (key == "window_prob") opt.window_prob = value.get<double>();
      else if (key == "window_width") opt.window_width = value.get<int>();
      else throw Error(ErrorCode::kConfigParse, "unknown probe option: " + key);
    }
    const auto r = ex::timex_probe(c->cfg, opt, model ? &model->model : nullptr,
                                   vocab ? &vocab->vocab : nullptr,
                                   progress_callback(progress, user_data));
    ordered_json j;
    j["report"] = r.evaluation.report.to_json();
    auto& preds = j["predictions"] = ordered_json::array();
    for (std::size_t i = 0; i < r.eval_set.size(); ++i) {
      ordered_json row;
      row["id"] = r.eval_set[i].source_id;
      row["gold"] = r.eval_set[i].gold;
      if (r.evaluation.predictions[i]) row["pred"] = *r.evaluation.predictions[i];
      else row["pred"] = nullptr;
      preds.push_back(row);
    }
    j["loss_curve"] = doubles(r.loss_curve);
    emit(j, result_json);
  });
}

tempo_status tempo_scaling_curve(const tempo_config* c, const char* options_json,
                                 tempo_progress_fn progress, void* user_data,
                                 char** result_json) {
  return guarded([&] {
    require(c != nullptr, "config is null");
    const json o = parse_json(options_json, "scaling options");
    ex::ScalingOptions opt;
    std::string schemas = c->cfg.paths.data_dir + "/schemas.txt";
    for (const auto& [key, value] : o.items()) {
      if (key == "sizes") opt.sizes = value.get<std::vector<int>>();
      else if (key == "held_out") opt.held_out = value.get<int>();
      else if (key == "schemas") schemas = value.get<std::string>();
      else throw Error(ErrorCode::kConfigParse, "unknown scaling option: " + key);
    }
    const auto points = ex::scaling_curve(c->cfg, tempo::datasets::load_schemas(schemas), opt,
                                          progress_callback(progress, user_data));
    ordered_json j;
    auto& arr = j["points"] = ordered_json::array();
    for (const auto& p : points) {
      arr.push_back({{"n_sequences", p.n_sequences},
                     {"pairwise_accuracy", p.pairwise_accuracy},
                     {"exact_match", p.exact_match},
                     {"insertion_em", p.insertion_em},
                     {"final_loss", p.final_loss}});
    }
    j["csv"] = tempo::eval::scaling_csv(points);
    emit(j, result_json);
  });
}

}  // extern "C"
