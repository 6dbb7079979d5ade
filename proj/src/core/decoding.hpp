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

#ifndef TEMPO_CORE_DECODING_HPP_
#define TEMPO_CORE_DECODING_HPP_

#include <cstdint>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "corruption.hpp"
#include "events.hpp"
#include "json.hpp"
#include "rng.hpp"
#include "seq2seq.hpp"
#include "vocab.hpp"

namespace tempo::decoding {

using Model = seq2seq::Seq2SeqModel<float>;

struct DecodeConfig {
  int beam_size = 4;
  double nucleus_p = 0.8;
  int max_decode_len = 128;
  std::set<int> banned_token_ids;
  std::uint64_t seed = 11;
  // Rank finished beams by mean instead of summed log-probability.
  bool length_normalize = false;

  void validate() const;
  nlohmann::ordered_json to_json() const;
  static DecodeConfig from_json(const nlohmann::json& j);
};

// ---- rendering bridge -------------------------------------------------

std::vector<int> encode_input(const text::Vocab& vocab,
                              const std::vector<events::Event>& events,
                              const events::TagScheme& scheme);

seq2seq::EncodedPair encode_example(const corruption::TrainingExample& ex,
                                    const events::TagScheme& scheme,
                                    const text::Vocab& vocab);

// Matches each candidate event to an equal, not yet used source event.
std::vector<std::optional<int>> infer_input_map(
    const std::vector<events::Event>& source,
    const std::vector<events::Event>& candidate);

// ---- search -----------------------------------------------------------

struct Hypothesis {
  std::vector<int> tokens;  // generated tokens, without BOS/EOS
  double score = 0.0;       // summed log-probability (EOS included)
  bool finished = false;
};

// Finished hypotheses first, then best score; ties broken by lexicographic
// token ids.
std::vector<Hypothesis> beam_search(const Model& model,
                                    std::span<const int> src,
                                    const DecodeConfig& cfg);

std::vector<int> greedy_decode(const Model& model, std::span<const int> src,
                               int max_decode_len);

// Samples one token id from the smallest top-probability set with mass >= p,
// after removing banned ids. Ties in probability are ordered by id.
int sample_nucleus(std::span<const float> logits, double p,
                   const std::vector<char>& banned, Rng& rng);

// Samples a continuation of `prefix` (decoder tokens after BOS) until EOS or
// max_decode_len. Returns only the newly generated tokens.
std::vector<int> nucleus_sample(const Model& model, std::span<const int> src,
                                std::span<const int> prefix,
                                const DecodeConfig& cfg);

// ---- scoring ----------------------------------------------------------

// log p of every gold position (target tokens then EOS).
std::vector<double> token_log_probs(const Model& model,
                                    std::span<const int> src,
                                    std::span<const int> tgt);

struct SequenceScore {
  double log_gen = 0.0;
  double log_tag = 0.0;
  bool degenerate = false;  // candidate had no events
};

// Both scores for one candidate ordering. The tag score is only defined for
// the indexed scheme; plain-scheme callers get log_tag = 0.
SequenceScore score_candidate(const Model& model, const text::Vocab& vocab,
                              const std::vector<events::Event>& src_events,
                              const std::vector<events::Event>& candidate,
                              const events::TagScheme& scheme);

double score_gen(const Model& model, const text::Vocab& vocab,
                 const std::vector<events::Event>& src_events,
                 const std::vector<events::Event>& candidate,
                 const events::TagScheme& scheme);

// Sum over event-tag positions only. Throws for the plain scheme.
double score_tag(const Model& model, const text::Vocab& vocab,
                 const std::vector<events::Event>& src_events,
                 const std::vector<events::Event>& candidate,
                 const events::TagScheme& scheme);

// ---- ordering ---------------------------------------------------------

enum class AlignSource { kTag, kPredicate, kAppended };

struct Alignment {
  std::vector<int> order;          // output rank -> input index
  std::vector<AlignSource> source; // per output rank
};

Alignment align_output(const std::vector<events::Event>& input,
                       const std::vector<events::ParsedSegment>& segments,
                       const events::TagScheme& scheme);

struct OrderingPrediction {
  std::vector<int> order;  // output rank -> input index
  std::vector<int> rank;   // input index -> output rank
  std::string raw_generated;
  std::vector<AlignSource> flags;
};

OrderingPrediction order_events(const Model& model, const text::Vocab& vocab,
                                const std::vector<events::Event>& input,
                                const events::TagScheme& scheme,
                                const DecodeConfig& cfg);

enum class ScoreMode { kGen, kTag };

// Scores every permutation of the input (n <= 6) and returns the best one.
OrderingPrediction order_by_scoring(const Model& model,
                                    const text::Vocab& vocab,
                                    const std::vector<events::Event>& input,
                                    const events::TagScheme& scheme,
                                    ScoreMode mode);

// ---- insertion and infilling -----------------------------------------

struct InsertionRanking {
  std::vector<int> ranked_positions;  // best first
  std::vector<double> gen_scores;     // by insertion position 0..N
  std::vector<double> tag_scores;     // empty for the plain scheme
};

InsertionRanking rank_insertions(const Model& model, const text::Vocab& vocab,
                                 const std::vector<events::Event>& seed_events,
                                 const events::Event& new_event,
                                 const events::TagScheme& scheme,
                                 ScoreMode mode = ScoreMode::kGen);

struct InfillQuery {
  std::vector<events::Event> seed_events;
  int position = 0;  // insert before seed_events[position]; N appends
};

struct InfillResult {
  events::Event event;
  std::string raw_generated;
  std::vector<int> tokens;
  std::set<int> banned;  // effective predicate ban set
};

InfillResult infill(const Model& model, const text::Vocab& vocab,
                    const InfillQuery& query, const events::TagScheme& scheme,
                    const DecodeConfig& cfg);

// Rebuilds an event from a generated "<predicate> [A] <body>" segment.
std::optional<events::Event> event_from_segment(
    const events::ParsedSegment& seg);

}  // namespace tempo::decoding

#endif  // TEMPO_CORE_DECODING_HPP_
