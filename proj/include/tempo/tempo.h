/*
 * Copyright 2026 The Tempo Authors.
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

/*
 * C interface to the tempo event-ordering library.
 *
 * Objects are opaque handles created and destroyed through this API.
 * Every fallible call returns a tempo_status; on failure a human-readable
 * message is available from tempo_last_error() on the calling thread until
 * the next call on that thread. Structured inputs and outputs are UTF-8 JSON
 * strings. Strings returned through `char**` out-parameters are owned by the
 * caller and must be released with tempo_string_free().
 */
#ifndef TEMPO_TEMPO_H_
#define TEMPO_TEMPO_H_

#ifdef __cplusplus
extern "C" {
#endif

#if defined(_WIN32)
#if defined(TEMPO_BUILDING_LIBRARY)
#define TEMPO_API __declspec(dllexport)
#else
#define TEMPO_API __declspec(dllimport)
#endif
#else
#define TEMPO_API __attribute__((visibility("default")))
#endif

typedef enum tempo_status {
  TEMPO_OK = 0,
  TEMPO_ERR_INVALID_ARGUMENT = 1,
  TEMPO_ERR_CONFIG_PARSE = 2,
  TEMPO_ERR_MISSING_FILE = 3,
  TEMPO_ERR_SHAPE_MISMATCH = 4,
  TEMPO_ERR_SIZE_LIMIT = 5,
  TEMPO_ERR_NUMERIC = 6,
  TEMPO_ERR_PARSE = 7,
  TEMPO_ERR_CYCLE = 8,
  TEMPO_ERR_IO = 9,
  TEMPO_ERR_INTERNAL = 10
} tempo_status;

typedef struct tempo_config tempo_config;
typedef struct tempo_vocab tempo_vocab;
typedef struct tempo_model tempo_model;

/* Called after every optimizer update during training. */
typedef void (*tempo_progress_fn)(int step, double loss, double learning_rate,
                                  void* user_data);

TEMPO_API const char* tempo_version(void);
TEMPO_API const char* tempo_status_name(tempo_status status);
TEMPO_API const char* tempo_last_error(void);
TEMPO_API void tempo_string_free(char* s);

/* ---- run configuration ------------------------------------------------ */

/* Parses a run configuration. NULL or "" yields the "toy" preset. A
 * top-level "preset" key selects the base that the remaining keys patch. */
TEMPO_API tempo_status tempo_config_parse(const char* json, tempo_config** out);
TEMPO_API tempo_status tempo_config_to_json(const tempo_config* cfg, char** out_json);
TEMPO_API tempo_status tempo_config_hash(const tempo_config* cfg, char** out_hex);
TEMPO_API void tempo_config_free(tempo_config* cfg);

/* ---- data ------------------------------------------------------------- */

/* Writes an event-sequence JSONL corpus to out_path. request_json fields:
 *   "source": "schema" | "timex" | "dag" | "documents"
 *   "n", "seed", "drop_prob", "schemas"            (schema)
 *   "n", "seed", "kind", "events_per_sequence",
 *   "held_out_years", "split": "train" | "eval"     (timex)
 *   "input"                                         (dag, documents)
 * Returns a JSON summary. */
TEMPO_API tempo_status tempo_generate_corpus(const tempo_config* cfg,
                                             const char* request_json,
                                             const char* out_path,
                                             char** summary_json);

/* ---- vocabulary ------------------------------------------------------- */

TEMPO_API tempo_status tempo_vocab_build(const tempo_config* cfg,
                                         const char* corpus_path,
                                         tempo_vocab** out);
TEMPO_API tempo_status tempo_vocab_load(const char* path, tempo_vocab** out);
TEMPO_API tempo_status tempo_vocab_save(const tempo_vocab* vocab, const char* path);
TEMPO_API int tempo_vocab_size(const tempo_vocab* vocab);
TEMPO_API void tempo_vocab_free(tempo_vocab* vocab);

/* ---- models ----------------------------------------------------------- */

/* kind: "seq2seq", "pairwise" or "pointer". */
TEMPO_API tempo_status tempo_model_create(const tempo_config* cfg, const char* kind,
                                          const tempo_vocab* vocab, tempo_model** out);
TEMPO_API tempo_status tempo_model_load(const char* path, tempo_model** out);
TEMPO_API tempo_status tempo_model_save(const tempo_model* model, const char* path);
TEMPO_API const char* tempo_model_kind(const tempo_model* model);
TEMPO_API void tempo_model_free(tempo_model* model);

/* Trains on an event-sequence JSONL corpus. The result JSON holds the loss
 * curve and the resolved training schedule. */
TEMPO_API tempo_status tempo_model_train(tempo_model* model, const tempo_vocab* vocab,
                                         const tempo_config* cfg,
                                         const char* corpus_path,
                                         tempo_progress_fn progress, void* user_data,
                                         char** result_json);

/* ---- inference -------------------------------------------------------- */

/* events_json: array of events. mode: "generate", "score-gen" or
 * "score-tag" (seq2seq only; NULL means "generate"). */
TEMPO_API tempo_status tempo_order(const tempo_model* model, const tempo_vocab* vocab,
                                   const tempo_config* cfg, const char* events_json,
                                   const char* mode, char** result_json);

/* query_json: {"events": [...], "position": i, "seed": optional}. */
TEMPO_API tempo_status tempo_infill(const tempo_model* model, const tempo_vocab* vocab,
                                    const tempo_config* cfg, const char* query_json,
                                    char** result_json);

/* query_json: {"events": [...], "new_event": {...}, "score": "gen" | "tag"}. */
TEMPO_API tempo_status tempo_rank_insert(const tempo_model* model,
                                         const tempo_vocab* vocab,
                                         const tempo_config* cfg,
                                         const char* query_json, char** result_json);

/* ---- evaluation ------------------------------------------------------- */

/* Scrambles every sequence in eval_path twice and orders the scrambles.
 * Returns {"report": {...}, "predictions": [...]}. */
TEMPO_API tempo_status tempo_eval_ordering(const tempo_model* model,
                                           const tempo_vocab* vocab,
                                           const tempo_config* cfg,
                                           const char* eval_path, const char* mode,
                                           char** result_json);

/* Removes one event per sequence in eval_path and ranks where it belongs. */
TEMPO_API tempo_status tempo_eval_insertion(const tempo_model* model,
                                            const tempo_vocab* vocab,
                                            const tempo_config* cfg,
                                            const char* eval_path, const char* score,
                                            char** result_json);

/* Before/after evaluation on question fixtures. NULL paths use the shipped
 * data files. */
TEMPO_API tempo_status tempo_eval_mctaco(const tempo_model* model,
                                         const tempo_vocab* vocab,
                                         const tempo_config* cfg,
                                         const char* fixture_path,
                                         const char* templates_path,
                                         const char* mode, char** result_json);

/* ---- experiments ------------------------------------------------------ */

/* Finite-difference check of a tiny double-precision model. */
TEMPO_API tempo_status tempo_grad_check(const tempo_config* cfg, char** result_json);

/* options_json: {"kind", "train_sequences", "eval_examples", ...}. With a
 * NULL model a fresh one is trained first. */
TEMPO_API tempo_status tempo_timex_probe(const tempo_model* model,
                                         const tempo_vocab* vocab,
                                         const tempo_config* cfg,
                                         const char* options_json,
                                         tempo_progress_fn progress, void* user_data,
                                         char** result_json);

/* options_json: {"sizes": [...], "held_out": n, "schemas": path}. Returns
 * {"points": [...], "csv": "..."}. */
TEMPO_API tempo_status tempo_scaling_curve(const tempo_config* cfg,
                                           const char* options_json,
                                           tempo_progress_fn progress, void* user_data,
                                           char** result_json);

#ifdef __cplusplus
}
#endif

#endif /* TEMPO_TEMPO_H_ */
