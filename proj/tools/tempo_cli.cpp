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

// Command-line driver. Every subcommand resolves a run configuration, does
// its work through the C API, and leaves predictions.jsonl, report.json and
// manifest.json in the run directory. `replay <manifest>` reruns a recorded
// invocation from the manifest alone.

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <memory>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "tempo/tempo.h"

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

namespace {

constexpr int kUsageExit = 64;

// Carries a C API status out of nested helpers.
struct Failure : std::runtime_error {
  tempo_status status;
  Failure(tempo_status s, const std::string& msg) : std::runtime_error(msg), status(s) {}
};

void check(tempo_status s) {
  if (s != TEMPO_OK) throw Failure(s, tempo_last_error());
}

void fail(tempo_status s, const std::string& msg) { throw Failure(s, msg); }

json take_json(char* raw) {
  std::unique_ptr<char, decltype(&tempo_string_free)> guard(raw, tempo_string_free);
  return json::parse(raw);
}

struct ConfigDeleter { void operator()(tempo_config* c) const { tempo_config_free(c); } };
struct VocabDeleter { void operator()(tempo_vocab* v) const { tempo_vocab_free(v); } };
struct ModelDeleter { void operator()(tempo_model* m) const { tempo_model_free(m); } };
using ConfigPtr = std::unique_ptr<tempo_config, ConfigDeleter>;
using VocabPtr = std::unique_ptr<tempo_vocab, VocabDeleter>;
using ModelPtr = std::unique_ptr<tempo_model, ModelDeleter>;

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(TEMPO_ERR_MISSING_FILE, "cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) fail(TEMPO_ERR_IO, "cannot write " + path.string());
  out << text;
  if (!out) fail(TEMPO_ERR_IO, "write failed: " + path.string());
}

json parse_json_text(const std::string& text, const std::string& what, tempo_status on_error) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    fail(on_error, what + ": " + e.what());
  }
  return {};
}

void require_file(const std::string& path, const std::string& flag) {
  if (path.empty()) fail(TEMPO_ERR_INVALID_ARGUMENT, flag + " is required");
  if (!fs::is_regular_file(path)) fail(TEMPO_ERR_MISSING_FILE, flag + ": no such file " + path);
}

// Values of a subcommand's options, keyed by long flag name. Stored as
// strings so that a manifest can replay them verbatim.
using Args = std::map<std::string, std::string>;

struct Run {
  std::string command;
  Args args;
  json config;  // fully resolved
  ConfigPtr handle;
  fs::path dir;
  int log_every = 100;

  const std::string& arg(const std::string& key) const {
    static const std::string empty;
    auto it = args.find(key);
    return it == args.end() ? empty : it->second;
  }
  int int_arg(const std::string& key) const {
    try {
      return std::stoi(arg(key));
    } catch (const std::exception&) {
      fail(TEMPO_ERR_INVALID_ARGUMENT, "--" + key + " expects an integer, got '" + arg(key) + "'");
    }
    return 0;
  }
  double double_arg(const std::string& key) const {
    try {
      return std::stod(arg(key));
    } catch (const std::exception&) {
      fail(TEMPO_ERR_INVALID_ARGUMENT, "--" + key + " expects a number, got '" + arg(key) + "'");
    }
    return 0;
  }
  // Output file inside the run directory unless the flag names one.
  std::string out_path(const std::string& key, const std::string& fallback) const {
    return arg(key).empty() ? (dir / fallback).string() : arg(key);
  }
};

void set_dotted(json& root, const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos || eq == 0) {
    fail(TEMPO_ERR_CONFIG_PARSE, "--set expects key.path=value, got '" + assignment + "'");
  }
  const std::string path = assignment.substr(0, eq);
  const std::string raw = assignment.substr(eq + 1);
  json value;
  try {
    value = json::parse(raw);
  } catch (const json::parse_error&) {
    value = raw;  // bare strings need no quotes
  }
  json* node = &root;
  std::size_t start = 0;
  while (true) {
    const auto dot = path.find('.', start);
    const std::string key = path.substr(start, dot == std::string::npos ? dot : dot - start);
    if (dot == std::string::npos) {
      (*node)[key] = value;
      return;
    }
    node = &(*node)[key];
    if (!node->is_object() && !node->is_null()) {
      fail(TEMPO_ERR_CONFIG_PARSE, "--set path crosses a non-object at '" + key + "'");
    }
    start = dot + 1;
  }
}

struct GlobalFlags {
  std::string config_file;
  std::string preset;
  std::vector<std::string> sets;
  std::string out;
  std::string data_dir;
  long long seed = -1;
  int log_every = 100;
};

// File, then preset, then --set, then dedicated flags.
json resolve_config(const GlobalFlags& g) {
  json j = json::object();
  if (!g.config_file.empty()) {
    require_file(g.config_file, "--config");
    j = parse_json_text(read_file(g.config_file), g.config_file, TEMPO_ERR_CONFIG_PARSE);
    if (!j.is_object()) fail(TEMPO_ERR_CONFIG_PARSE, "config file must hold a JSON object");
  }
  if (!g.preset.empty()) j["preset"] = g.preset;
  for (const auto& s : g.sets) set_dotted(j, s);
  if (!g.out.empty()) j["paths"]["out_dir"] = g.out;
  if (!g.data_dir.empty()) j["paths"]["data_dir"] = g.data_dir;
  if (g.seed >= 0) j["seed"] = g.seed;
  return j;
}

void open_config(Run& run, const json& partial) {
  tempo_config* raw = nullptr;
  check(tempo_config_parse(partial.dump().c_str(), &raw));
  run.handle.reset(raw);
  char* text = nullptr;
  check(tempo_config_to_json(raw, &text));
  run.config = take_json(text);
  run.dir = run.config["paths"]["out_dir"].get<std::string>();
  std::error_code ec;
  fs::create_directories(run.dir, ec);
  if (ec) fail(TEMPO_ERR_IO, "cannot create run directory " + run.dir.string());
}

void progress_printer(int step, double loss, double lr, void* user) {
  const int every = *static_cast<int*>(user);
  if (every > 0 && step % every == 0) {
    std::fprintf(stderr, "step %6d  loss %.5f  lr %.3g\n", step, loss, lr);
  }
}

void write_manifest(const Run& run) {
  char* hash = nullptr;
  check(tempo_config_hash(run.handle.get(), &hash));
  std::string hex(hash);
  tempo_string_free(hash);
  json m;
  m["command"] = run.command;
  json args = json::object();
  for (const auto& [k, v] : run.args) args[k] = v;
  m["args"] = args;
  m["config"] = run.config;
  m["config_hash"] = hex;
  m["seeds"] = {{"run", run.config["seed"]},
                {"corruption", run.config["corruption"]["seed"]},
                {"decode", run.config["decode"]["seed"]},
                {"train", run.config["train"]["seed"]}};
  m["version"] = tempo_version();
  write_file(run.dir / "manifest.json", m.dump(2) + "\n");
}

void write_report(const Run& run, const json& report) {
  write_file(run.dir / "report.json", report.dump(2) + "\n");
}

void write_predictions(const Run& run, const json& rows) {
  std::string text;
  for (const auto& r : rows) text += r.dump() + "\n";
  write_file(run.dir / "predictions.jsonl", text);
}

std::vector<json> read_jsonl(const std::string& path) {
  std::istringstream in(read_file(path));
  std::vector<json> rows;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    rows.push_back(parse_json_text(line, path + ":" + std::to_string(line_no), TEMPO_ERR_PARSE));
  }
  return rows;
}

VocabPtr load_vocab(const std::string& path) {
  require_file(path, "--vocab");
  tempo_vocab* v = nullptr;
  check(tempo_vocab_load(path.c_str(), &v));
  return VocabPtr(v);
}

ModelPtr load_model(const std::string& path) {
  require_file(path, "--model");
  tempo_model* m = nullptr;
  check(tempo_model_load(path.c_str(), &m));
  return ModelPtr(m);
}

// Accepts either a bare sequence record or an object with an "events" array.
json events_of(const json& row) {
  if (row.is_array()) return row;
  if (row.contains("events")) return row.at("events");
  fail(TEMPO_ERR_PARSE, "input row has no \"events\" array");
  return {};
}

// ---- subcommands --------------------------------------------------------

void cmd_gen_data(Run& run) {
  json req;
  req["source"] = run.arg("source");
  req["split"] = run.arg("split");
  req["n"] = run.int_arg("n");
  req["seed"] = run.arg("seed").empty() ? run.config["seed"] : json(run.int_arg("seed"));
  if (!run.arg("train-n").empty()) req["train_n"] = run.int_arg("train-n");
  if (!run.arg("kind").empty()) req["kind"] = run.arg("kind");
  if (!run.arg("input").empty()) {
    require_file(run.arg("input"), "--input");
    req["input"] = run.arg("input");
  }
  if (!run.arg("schemas").empty()) req["schemas"] = run.arg("schemas");
  if (!run.arg("drop-prob").empty()) req["drop_prob"] = run.double_arg("drop-prob");
  const std::string out = run.out_path("output", "corpus.jsonl");
  char* summary = nullptr;
  check(tempo_generate_corpus(run.handle.get(), req.dump().c_str(), out.c_str(), &summary));
  json report = take_json(summary);
  write_report(run, report);
  std::cout << report.dump() << "\n";
}

void cmd_build_vocab(Run& run) {
  require_file(run.arg("corpus"), "--corpus");
  tempo_vocab* v = nullptr;
  check(tempo_vocab_build(run.handle.get(), run.arg("corpus").c_str(), &v));
  VocabPtr vocab(v);
  const std::string out = run.out_path("output", "vocab.json");
  check(tempo_vocab_save(vocab.get(), out.c_str()));
  json report{{"vocab_size", tempo_vocab_size(vocab.get())}};
  write_report(run, report);
  std::cout << report.dump() << "\n";
}

void train_kind(Run& run, const std::string& kind) {
  require_file(run.arg("corpus"), "--corpus");
  VocabPtr vocab;
  if (!run.arg("vocab").empty()) {
    vocab = load_vocab(run.arg("vocab"));
  } else {
    tempo_vocab* v = nullptr;
    check(tempo_vocab_build(run.handle.get(), run.arg("corpus").c_str(), &v));
    vocab.reset(v);
    check(tempo_vocab_save(vocab.get(), (run.dir / "vocab.json").string().c_str()));
  }
  tempo_model* m = nullptr;
  check(tempo_model_create(run.handle.get(), kind.c_str(), vocab.get(), &m));
  ModelPtr model(m);
  char* result = nullptr;
  check(tempo_model_train(model.get(), vocab.get(), run.handle.get(), run.arg("corpus").c_str(),
                          progress_printer, &run.log_every, &result));
  json report = take_json(result);
  const std::string out = run.out_path("model-out", "model.ckpt");
  check(tempo_model_save(model.get(), out.c_str()));
  write_report(run, report);
  std::cout << "trained " << kind << ": " << report["steps"] << " steps, final loss "
            << report["final_loss"] << "\n";
}

void cmd_train(Run& run) { train_kind(run, "seq2seq"); }

void cmd_train_baseline(Run& run) {
  const auto& kind = run.arg("kind");
  if (kind != "pairwise" && kind != "pointer") {
    fail(TEMPO_ERR_INVALID_ARGUMENT, "--kind must be pairwise or pointer");
  }
  train_kind(run, kind);
}

void cmd_order(Run& run) {
  auto model = load_model(run.arg("model"));
  auto vocab = load_vocab(run.arg("vocab"));
  require_file(run.arg("input"), "--input");
  json rows = json::array();
  for (const auto& row : read_jsonl(run.arg("input"))) {
    char* result = nullptr;
    check(tempo_order(model.get(), vocab.get(), run.handle.get(), events_of(row).dump().c_str(),
                      run.arg("mode").c_str(), &result));
    json r = take_json(result);
    if (row.is_object() && row.contains("id")) r["id"] = row["id"];
    rows.push_back(std::move(r));
  }
  write_predictions(run, rows);
  write_report(run, json{{"task", "order"}, {"n_examples", rows.size()}, {"mode", run.arg("mode")}});
}

void cmd_infill(Run& run) {
  auto model = load_model(run.arg("model"));
  auto vocab = load_vocab(run.arg("vocab"));
  require_file(run.arg("input"), "--input");
  const int samples = run.int_arg("samples");
  if (samples < 1) fail(TEMPO_ERR_INVALID_ARGUMENT, "--samples must be at least 1");
  const long long base_seed = run.config["decode"]["seed"].get<long long>();
  json rows = json::array();
  int n = 0;
  int unparsed = 0;
  for (const auto& row : read_jsonl(run.arg("input"))) {
    for (int s = 0; s < samples; ++s) {
      json q{{"events", events_of(row)}, {"position", row.at("position")},
             {"seed", row.value("seed", base_seed) + s}};
      char* result = nullptr;
      const tempo_status status =
          tempo_infill(model.get(), vocab.get(), run.handle.get(), q.dump().c_str(), &result);
      json r;
      if (status == TEMPO_ERR_PARSE) {
        // An unparseable sample is a model outcome, not a run failure.
        r = json{{"error", tempo_last_error()}};
        ++unparsed;
      } else {
        check(status);
        r = take_json(result);
      }
      r["query"] = n;
      r["sample"] = s;
      rows.push_back(std::move(r));
    }
    ++n;
  }
  write_predictions(run, rows);
  write_report(run, json{{"task", "infill"}, {"n_queries", n}, {"samples_per_query", samples},
                         {"n_unparsed", unparsed}});
}

void cmd_rank_insert(Run& run) {
  auto model = load_model(run.arg("model"));
  auto vocab = load_vocab(run.arg("vocab"));
  require_file(run.arg("input"), "--input");
  json rows = json::array();
  int top1 = 0, top2 = 0, labeled = 0;
  for (const auto& row : read_jsonl(run.arg("input"))) {
    json q{{"events", events_of(row)}, {"new_event", row.at("new_event")},
           {"score", run.arg("score")}};
    if (row.contains("gold_position")) q["gold_position"] = row["gold_position"];
    char* result = nullptr;
    check(tempo_rank_insert(model.get(), vocab.get(), run.handle.get(), q.dump().c_str(), &result));
    json r = take_json(result);
    if (r.contains("top1")) {
      ++labeled;
      top1 += r["top1"].get<bool>();
      top2 += r["top2"].get<bool>();
    }
    rows.push_back(std::move(r));
  }
  json report{{"task", "insertion"}, {"n_examples", rows.size()}, {"score", run.arg("score")}};
  if (labeled > 0) {
    report["exact_match"] = static_cast<double>(top1) / labeled;
    report["top2_exact_match"] = static_cast<double>(top2) / labeled;
  }
  write_predictions(run, rows);
  write_report(run, report);
}

void emit_evaluation(Run& run, const json& result) {
  write_predictions(run, result.at("predictions"));
  json report = result.at("report");
  for (const auto& [k, v] : result.items()) {
    if (k != "report" && k != "predictions") report[k] = v;
  }
  write_report(run, report);
  std::cout << result.at("report").dump() << "\n";
}

void cmd_eval_ordering(Run& run) {
  auto model = load_model(run.arg("model"));
  auto vocab = load_vocab(run.arg("vocab"));
  require_file(run.arg("eval"), "--eval");
  char* result = nullptr;
  if (run.arg("task") == "insertion") {
    check(tempo_eval_insertion(model.get(), vocab.get(), run.handle.get(), run.arg("eval").c_str(),
                               run.arg("score").c_str(), &result));
  } else if (run.arg("task") == "ordering") {
    check(tempo_eval_ordering(model.get(), vocab.get(), run.handle.get(), run.arg("eval").c_str(),
                              run.arg("mode").c_str(), &result));
  } else {
    fail(TEMPO_ERR_INVALID_ARGUMENT, "--task must be ordering or insertion");
  }
  emit_evaluation(run, take_json(result));
}

void cmd_eval_mctaco(Run& run) {
  auto model = load_model(run.arg("model"));
  auto vocab = load_vocab(run.arg("vocab"));
  const auto& fixture = run.arg("fixture");
  const auto& templates = run.arg("templates");
  if (!fixture.empty()) require_file(fixture, "--fixture");
  if (!templates.empty()) require_file(templates, "--templates");
  char* result = nullptr;
  check(tempo_eval_mctaco(model.get(), vocab.get(), run.handle.get(),
                          fixture.empty() ? nullptr : fixture.c_str(),
                          templates.empty() ? nullptr : templates.c_str(),
                          run.arg("mode").c_str(), &result));
  emit_evaluation(run, take_json(result));
}

void cmd_timex_probe(Run& run) {
  json opt{{"kind", run.arg("kind")},
           {"train_sequences", run.int_arg("train-sequences")},
           {"eval_examples", run.int_arg("eval-examples")}};
  ModelPtr model;
  VocabPtr vocab;
  if (!run.arg("model").empty()) {
    model = load_model(run.arg("model"));
    vocab = load_vocab(run.arg("vocab"));
  }
  char* result = nullptr;
  check(tempo_timex_probe(model.get(), vocab.get(), run.handle.get(), opt.dump().c_str(),
                          progress_printer, &run.log_every, &result));
  emit_evaluation(run, take_json(result));
}

void cmd_grad_check(Run& run) {
  char* result = nullptr;
  check(tempo_grad_check(run.handle.get(), &result));
  json report = take_json(result);
  write_report(run, report);
  std::cout << report.dump() << "\n";
  if (!report.value("passed", false)) fail(TEMPO_ERR_NUMERIC, "gradient check failed");
}

void cmd_scaling_curve(Run& run) {
  json opt = json::object();
  if (!run.arg("sizes").empty()) {
    json sizes = json::array();
    std::stringstream ss(run.arg("sizes"));
    std::string item;
    while (std::getline(ss, item, ',')) {
      try {
        sizes.push_back(std::stoi(item));
      } catch (const std::exception&) {
        fail(TEMPO_ERR_INVALID_ARGUMENT, "--sizes expects comma-separated integers");
      }
    }
    opt["sizes"] = sizes;
  }
  opt["held_out"] = run.int_arg("held-out");
  if (!run.arg("schemas").empty()) {
    require_file(run.arg("schemas"), "--schemas");
    opt["schemas"] = run.arg("schemas");
  }
  char* result = nullptr;
  check(tempo_scaling_curve(run.handle.get(), opt.dump().c_str(), progress_printer, &run.log_every,
                            &result));
  json r = take_json(result);
  write_file(run.dir / "scaling.csv", r["csv"].get<std::string>());
  write_predictions(run, r["points"]);
  write_report(run, json{{"task", "scaling"}, {"points", r["points"]}});
  std::cout << r["csv"].get<std::string>();
}

using Handler = std::function<void(Run&)>;

struct Command {
  std::string name;
  std::string help;
  Handler handler;
  // Flag name, default, help.
  std::vector<std::tuple<std::string, std::string, std::string>> options;
};

const std::vector<Command>& commands() {
  static const std::vector<Command> table = {
      {"gen-data", "write a synthetic or converted event-sequence corpus", cmd_gen_data,
       {{"source", "schema", "schema | timex | dag | documents"},
        {"split", "train", "train | eval"},
        {"n", "1000", "number of sequences to sample"},
        {"train-n", "", "training size the eval split must not duplicate (schema)"},
        {"seed", "", "sampling seed (defaults to the run seed)"},
        {"kind", "", "timex kind: year | month | weekday | clock24 | clock12"},
        {"input", "", "input JSONL for dag and documents sources"},
        {"schemas", "", "schema definition file"},
        {"drop-prob", "", "probability of dropping a schema step"},
        {"output", "", "corpus path (default <run>/corpus.jsonl)"}}},
      {"build-vocab", "build a vocabulary from a corpus", cmd_build_vocab,
       {{"corpus", "", "event-sequence JSONL"}, {"output", "", "vocab path (default <run>/vocab.json)"}}},
      {"train", "train the denoising sequence-to-sequence model", cmd_train,
       {{"corpus", "", "event-sequence JSONL"},
        {"vocab", "", "existing vocabulary (built from the corpus when omitted)"},
        {"model-out", "", "checkpoint path (default <run>/model.ckpt)"}}},
      {"train-baseline", "train the pairwise or pointer ordering baseline", cmd_train_baseline,
       {{"kind", "pairwise", "pairwise | pointer"},
        {"corpus", "", "event-sequence JSONL"},
        {"vocab", "", "existing vocabulary (built from the corpus when omitted)"},
        {"model-out", "", "checkpoint path (default <run>/model.ckpt)"}}},
      {"order", "order unordered event sets", cmd_order,
       {{"model", "", "checkpoint"}, {"vocab", "", "vocabulary"},
        {"input", "", "JSONL of event arrays or {\"events\": [...]} rows"},
        {"mode", "generate", "generate | score-gen | score-tag"}}},
      {"infill", "generate a new event at a position", cmd_infill,
       {{"model", "", "checkpoint"}, {"vocab", "", "vocabulary"},
        {"input", "", "JSONL of {\"events\", \"position\"} rows"},
        {"samples", "1", "samples per query, seeds counted up from the decode seed"}}},
      {"rank-insert", "rank insertion positions for a new event", cmd_rank_insert,
       {{"model", "", "checkpoint"}, {"vocab", "", "vocabulary"},
        {"input", "", "JSONL of {\"events\", \"new_event\", \"gold_position\"?} rows"},
        {"score", "gen", "gen | tag"}}},
      {"eval-ordering", "evaluate ordering or insertion on a held-out corpus", cmd_eval_ordering,
       {{"model", "", "checkpoint"}, {"vocab", "", "vocabulary"},
        {"eval", "", "held-out event-sequence JSONL"},
        {"task", "ordering", "ordering | insertion"},
        {"mode", "generate", "generate | score-gen | score-tag"},
        {"score", "gen", "insertion score: gen | tag"}}},
      {"eval-mctaco", "before/after question evaluation", cmd_eval_mctaco,
       {{"model", "", "checkpoint"}, {"vocab", "", "vocabulary"},
        {"fixture", "", "question JSONL (default: shipped fixture)"},
        {"templates", "", "question templates (default: shipped templates)"},
        {"mode", "generate", "generate | score-gen | score-tag"}}},
      {"timex-probe", "train on timex sequences and order held-out fixtures", cmd_timex_probe,
       {{"kind", "year", "year | month | weekday | clock24 | clock12"},
        {"train-sequences", "20000", "training sequences"},
        {"eval-examples", "100", "evaluation fixtures"},
        {"model", "", "skip training and probe this checkpoint"},
        {"vocab", "", "vocabulary for --model"}}},
      {"grad-check", "finite-difference gradient check", cmd_grad_check, {}},
      {"scaling-curve", "ordering and insertion quality versus training size", cmd_scaling_curve,
       {{"sizes", "", "comma-separated training sizes"},
        {"held-out", "200", "held-out sequences"},
        {"schemas", "", "schema definition file"}}},
  };
  return table;
}

const Command* find_command(const std::string& name) {
  for (const auto& c : commands()) {
    if (c.name == name) return &c;
  }
  return nullptr;
}

int report_failure(const Failure& f) {
  std::cerr << "error [" << tempo_status_name(f.status) << "]: " << f.what() << "\n";
  return static_cast<int>(f.status);
}

int execute(Run& run, const Command& cmd, const json& partial_config) {
  try {
    open_config(run, partial_config);
    cmd.handler(run);
    write_manifest(run);
    return 0;
  } catch (const Failure& f) {
    return report_failure(f);
  } catch (const json::exception& e) {
    return report_failure(Failure(TEMPO_ERR_PARSE, e.what()));
  }
}

int replay(const std::string& manifest_path, const std::string& out, int log_every) {
  try {
    require_file(manifest_path, "manifest");
    const json m = parse_json_text(read_file(manifest_path), manifest_path, TEMPO_ERR_PARSE);
    const Command* cmd = find_command(m.at("command").get<std::string>());
    if (!cmd) fail(TEMPO_ERR_INVALID_ARGUMENT, "manifest names an unknown command");
    Run run;
    run.command = cmd->name;
    run.log_every = log_every;
    for (const auto& [k, v] : m.at("args").items()) run.args[k] = v.get<std::string>();
    json cfg = m.at("config");
    if (!out.empty()) cfg["paths"]["out_dir"] = out;
    return execute(run, *cmd, cfg);
  } catch (const Failure& f) {
    return report_failure(f);
  } catch (const json::exception& e) {
    return report_failure(Failure(TEMPO_ERR_PARSE, e.what()));
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Temporal event ordering, infilling and insertion"};
  app.require_subcommand(1);
  app.fallthrough();
  app.set_version_flag("--version", std::string(tempo_version()));

  GlobalFlags g;
  app.add_option("--config", g.config_file, "run configuration JSON");
  app.add_option("--preset", g.preset, "base preset: toy | paper");
  app.add_option("--set", g.sets, "override a config value, e.g. train.total_steps=500");
  app.add_option("--out", g.out, "run directory");
  app.add_option("--data-dir", g.data_dir, "directory with shipped data files");
  app.add_option("--seed", g.seed, "run seed");
  app.add_option("--log-every", g.log_every, "training progress interval (0 silences)");

  std::map<std::string, Args> values;
  std::map<std::string, CLI::App*> subs;
  for (const auto& cmd : commands()) {
    auto* sub = app.add_subcommand(cmd.name, cmd.help);
    subs[cmd.name] = sub;
    auto& args = values[cmd.name];
    for (const auto& [flag, def, help] : cmd.options) {
      args[flag] = def;
      auto* opt = sub->add_option("--" + flag, args[flag], help);
      if (!def.empty()) opt->capture_default_str();
    }
  }
  std::string manifest_path;
  auto* replay_cmd = app.add_subcommand("replay", "rerun the invocation recorded in a manifest");
  replay_cmd->add_option("manifest", manifest_path, "manifest.json of an earlier run")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : kUsageExit;
  }

  if (replay_cmd->parsed()) return replay(manifest_path, g.out, g.log_every);

  for (const auto& cmd : commands()) {
    if (!subs[cmd.name]->parsed()) continue;
    Run run;
    run.command = cmd.name;
    run.args = values[cmd.name];
    run.log_every = g.log_every;
    try {
      return execute(run, cmd, resolve_config(g));
    } catch (const Failure& f) {
      return report_failure(f);
    }
  }
  return kUsageExit;
}
