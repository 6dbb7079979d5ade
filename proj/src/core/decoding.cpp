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

#include "decoding.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "error.hpp"

namespace tempo::decoding {

using events::Event;
using events::TagScheme;
using events::TagVariant;

void DecodeConfig::validate() const {
  if (beam_size < 1) {
    throw Error(ErrorCode::kInvalidArgument, "beam_size must be >= 1");
  }
  if (!(nucleus_p > 0.0 && nucleus_p <= 1.0)) {
    throw Error(ErrorCode::kInvalidArgument, "nucleus_p must be in (0, 1]");
  }
  if (max_decode_len < 1) {
    throw Error(ErrorCode::kInvalidArgument, "max_decode_len must be >= 1");
  }
  for (int id : banned_token_ids) {
    if (id < 0) {
      throw Error(ErrorCode::kInvalidArgument, "banned token ids must be >= 0");
    }
  }
}

nlohmann::ordered_json DecodeConfig::to_json() const {
  nlohmann::ordered_json j;
  j["beam_size"] = beam_size;
  j["nucleus_p"] = nucleus_p;
  j["max_decode_len"] = max_decode_len;
  j["banned_token_ids"] = std::vector<int>(banned_token_ids.begin(),
                                           banned_token_ids.end());
  j["seed"] = seed;
  j["length_normalize"] = length_normalize;
  return j;
}

DecodeConfig DecodeConfig::from_json(const nlohmann::json& j) {
  if (!j.is_object()) {
    throw Error(ErrorCode::kConfigParse, "decode config must be an object");
  }
  DecodeConfig c;
  try {
    for (const auto& [key, value] : j.items()) {
      if (key == "beam_size") c.beam_size = value.get<int>();
      else if (key == "nucleus_p") c.nucleus_p = value.get<double>();
      else if (key == "max_decode_len") c.max_decode_len = value.get<int>();
      else if (key == "banned_token_ids") {
        auto ids = value.get<std::vector<int>>();
        c.banned_token_ids = std::set<int>(ids.begin(), ids.end());
      } else if (key == "seed") c.seed = value.get<std::uint64_t>();
      else if (key == "length_normalize") c.length_normalize = value.get<bool>();
      else throw Error(ErrorCode::kConfigParse, "unknown decode key: " + key);
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kConfigParse, std::string("decode config: ") + e.what());
  }
  c.validate();
  return c;
}

// ---- rendering bridge -------------------------------------------------

std::vector<int> encode_input(const text::Vocab& vocab,
                              const std::vector<Event>& events,
                              const TagScheme& scheme) {
  return vocab.encode(events::render_input(events, scheme).text);
}

seq2seq::EncodedPair encode_example(const corruption::TrainingExample& ex,
                                    const TagScheme& scheme,
                                    const text::Vocab& vocab) {
  seq2seq::EncodedPair pair;
  pair.src = encode_input(vocab, ex.input_events, scheme);
  pair.tgt = vocab.encode(
      events::render_target(ex.target.events, scheme, ex.target_to_input()));
  return pair;
}

std::vector<std::optional<int>> infer_input_map(
    const std::vector<Event>& source, const std::vector<Event>& candidate) {
  std::vector<char> used(source.size(), 0);
  std::vector<std::optional<int>> map(candidate.size());
  for (std::size_t j = 0; j < candidate.size(); ++j) {
    for (std::size_t i = 0; i < source.size(); ++i) {
      if (!used[i] && source[i] == candidate[j]) {
        used[i] = 1;
        map[j] = static_cast<int>(i);
        break;
      }
    }
  }
  return map;
}

// ---- search -----------------------------------------------------------

namespace {

std::vector<double> log_softmax(std::span<const float> logits) {
  double mx = -std::numeric_limits<double>::infinity();
  for (float v : logits) mx = std::max(mx, static_cast<double>(v));
  double z = 0.0;
  for (float v : logits) z += std::exp(static_cast<double>(v) - mx);
  const double lz = mx + std::log(z);
  std::vector<double> out(logits.size());
  for (std::size_t i = 0; i < logits.size(); ++i) out[i] = logits[i] - lz;
  return out;
}

std::span<const float> row_span(const nn::Matrix<float>& m) {
  return {m.data(), static_cast<std::size_t>(m.cols())};
}

std::vector<char> ban_mask(int vocab_size, const std::set<int>& banned) {
  std::vector<char> mask(static_cast<std::size_t>(vocab_size), 0);
  for (int id : banned) {
    if (id < vocab_size) mask[static_cast<std::size_t>(id)] = 1;
  }
  return mask;
}

struct Live {
  std::vector<int> tokens;
  double score = 0.0;
  Model::DecoderState state;
  std::vector<double> next;  // log-probs for the following token
};

double ranking_score(const Hypothesis& h, bool normalize) {
  if (!normalize) return h.score;
  const double len = static_cast<double>(h.tokens.size()) + (h.finished ? 1 : 0);
  return h.score / std::max(1.0, len);
}

}  // namespace

std::vector<Hypothesis> beam_search(const Model& model,
                                    std::span<const int> src,
                                    const DecodeConfig& cfg) {
  cfg.validate();
  const int vocab_size = model.config().vocab_size;
  std::set<int> banned = cfg.banned_token_ids;
  banned.insert(text::kPad);
  banned.insert(text::kBos);
  const auto mask = ban_mask(vocab_size, banned);

  const auto enc = model.encode(src);
  std::vector<Live> alive(1);
  alive[0].state = model.start();
  alive[0].next = log_softmax(row_span(model.step(enc, alive[0].state, text::kBos)));

  std::vector<Hypothesis> finished;
  struct Cand {
    double score;
    std::size_t beam;
    int token;
  };
  const auto beam = static_cast<std::size_t>(cfg.beam_size);

  for (int t = 0; t < cfg.max_decode_len && !alive.empty(); ++t) {
    std::vector<Cand> cands;
    cands.reserve(alive.size() * static_cast<std::size_t>(vocab_size));
    for (std::size_t b = 0; b < alive.size(); ++b) {
      for (int v = 0; v < vocab_size; ++v) {
        if (mask[static_cast<std::size_t>(v)]) continue;
        cands.push_back({alive[b].score + alive[b].next[static_cast<std::size_t>(v)], b, v});
      }
    }
    // Live hypotheses all share one length, so comparing prefixes then the
    // new token is the lexicographic order on the extended sequences.
    auto better = [&](const Cand& a, const Cand& b) {
      if (a.score != b.score) return a.score > b.score;
      if (a.beam != b.beam) return alive[a.beam].tokens < alive[b.beam].tokens;
      return a.token < b.token;
    };
    const std::size_t keep = std::min(beam, cands.size());
    std::partial_sort(cands.begin(), cands.begin() + static_cast<std::ptrdiff_t>(keep),
                      cands.end(), better);

    std::vector<Live> next_alive;
    for (std::size_t k = 0; k < keep; ++k) {
      const Cand& c = cands[k];
      const Live& parent = alive[c.beam];
      if (c.token == text::kEos) {
        finished.push_back({parent.tokens, c.score, true});
        continue;
      }
      Live child;
      child.tokens = parent.tokens;
      child.tokens.push_back(c.token);
      child.score = c.score;
      child.state = parent.state;
      child.next = log_softmax(row_span(model.step(enc, child.state, c.token)));
      next_alive.push_back(std::move(child));
    }
    alive = std::move(next_alive);

    if (finished.size() >= beam) break;
    if (!cfg.length_normalize && !finished.empty() && !alive.empty()) {
      double best_done = -std::numeric_limits<double>::infinity();
      for (const auto& h : finished) best_done = std::max(best_done, h.score);
      double best_alive = -std::numeric_limits<double>::infinity();
      for (const auto& h : alive) best_alive = std::max(best_alive, h.score);
      // Scores only decrease as hypotheses grow.
      if (best_done >= best_alive) break;
    }
  }

  for (auto& h : alive) finished.push_back({std::move(h.tokens), h.score, false});
  std::stable_sort(finished.begin(), finished.end(),
                   [&](const Hypothesis& a, const Hypothesis& b) {
                     if (a.finished != b.finished) return a.finished;
                     const double sa = ranking_score(a, cfg.length_normalize);
                     const double sb = ranking_score(b, cfg.length_normalize);
                     if (sa != sb) return sa > sb;
                     return a.tokens < b.tokens;
                   });
  return finished;
}

std::vector<int> greedy_decode(const Model& model, std::span<const int> src,
                               int max_decode_len) {
  const auto enc = model.encode(src);
  auto state = model.start();
  std::vector<int> out;
  int token = text::kBos;
  for (int t = 0; t < max_decode_len; ++t) {
    const auto logits = model.step(enc, state, token);
    int best = -1;
    for (int v = 0; v < logits.cols(); ++v) {
      if (v == text::kPad || v == text::kBos) continue;
      if (best < 0 || logits(0, v) > logits(0, best)) best = v;
    }
    if (best == text::kEos) break;
    out.push_back(best);
    token = best;
  }
  return out;
}

int sample_nucleus(std::span<const float> logits, double p,
                   const std::vector<char>& banned, Rng& rng) {
  if (!(p > 0.0 && p <= 1.0)) {
    throw Error(ErrorCode::kInvalidArgument, "nucleus p must be in (0, 1]");
  }
  std::vector<int> ids;
  double mx = -std::numeric_limits<double>::infinity();
  for (std::size_t v = 0; v < logits.size(); ++v) {
    if (v < banned.size() && banned[v]) continue;
    if (!std::isfinite(logits[v])) continue;
    ids.push_back(static_cast<int>(v));
    mx = std::max(mx, static_cast<double>(logits[v]));
  }
  if (ids.empty()) {
    throw Error(ErrorCode::kInvalidArgument,
                "every token is banned; nothing left to sample");
  }
  std::vector<double> prob(logits.size(), 0.0);
  double z = 0.0;
  for (int v : ids) {
    prob[static_cast<std::size_t>(v)] = std::exp(logits[static_cast<std::size_t>(v)] - mx);
    z += prob[static_cast<std::size_t>(v)];
  }
  for (int v : ids) prob[static_cast<std::size_t>(v)] /= z;
  std::sort(ids.begin(), ids.end(), [&](int a, int b) {
    const double pa = prob[static_cast<std::size_t>(a)];
    const double pb = prob[static_cast<std::size_t>(b)];
    return pa != pb ? pa > pb : a < b;
  });

  std::size_t cut = 0;
  double mass = 0.0;
  while (cut < ids.size()) {
    mass += prob[static_cast<std::size_t>(ids[cut])];
    ++cut;
    if (mass >= p) break;
  }
  if (cut == 1) return ids[0];
  double u = rng.uniform() * mass;
  for (std::size_t k = 0; k < cut; ++k) {
    u -= prob[static_cast<std::size_t>(ids[k])];
    if (u < 0.0) return ids[k];
  }
  return ids[cut - 1];
}

std::vector<int> nucleus_sample(const Model& model, std::span<const int> src,
                                std::span<const int> prefix,
                                const DecodeConfig& cfg) {
  cfg.validate();
  std::set<int> banned = cfg.banned_token_ids;
  banned.insert(text::kPad);
  banned.insert(text::kBos);
  const auto mask = ban_mask(model.config().vocab_size, banned);
  Rng rng(cfg.seed);

  const auto enc = model.encode(src);
  auto state = model.start();
  auto logits = model.step(enc, state, text::kBos);
  for (int tok : prefix) logits = model.step(enc, state, tok);

  std::vector<int> out;
  for (int t = 0; t < cfg.max_decode_len; ++t) {
    const int tok = sample_nucleus(row_span(logits), cfg.nucleus_p, mask, rng);
    if (tok == text::kEos) break;
    out.push_back(tok);
    logits = model.step(enc, state, tok);
  }
  return out;
}

// ---- scoring ----------------------------------------------------------

std::vector<double> token_log_probs(const Model& model,
                                    std::span<const int> src,
                                    std::span<const int> tgt) {
  const auto tgt_in = seq2seq::decoder_input(tgt);
  const auto gold = seq2seq::decoder_gold(tgt);
  const auto logits = model.logits(src, tgt_in);
  std::vector<double> out(gold.size());
  for (std::size_t j = 0; j < gold.size(); ++j) {
    const auto r = static_cast<Eigen::Index>(j);
    std::span<const float> row(logits.data() + r * logits.cols(),
                               static_cast<std::size_t>(logits.cols()));
    out[j] = log_softmax(row)[static_cast<std::size_t>(gold[j])];
  }
  return out;
}

SequenceScore score_candidate(const Model& model, const text::Vocab& vocab,
                              const std::vector<Event>& src_events,
                              const std::vector<Event>& candidate,
                              const TagScheme& scheme) {
  const auto src = encode_input(vocab, src_events, scheme);
  const auto tgt = vocab.encode(events::render_target(
      candidate, scheme, infer_input_map(src_events, candidate)));
  const auto lps = token_log_probs(model, src, tgt);
  const auto gold = seq2seq::decoder_gold(tgt);

  SequenceScore s;
  s.degenerate = candidate.empty();
  for (std::size_t j = 0; j < lps.size(); ++j) {
    s.log_gen += lps[j];
    if (scheme.variant == TagVariant::kIndexed && vocab.is_event_tag(gold[j])) {
      s.log_tag += lps[j];
    }
  }
  return s;
}

double score_gen(const Model& model, const text::Vocab& vocab,
                 const std::vector<Event>& src_events,
                 const std::vector<Event>& candidate, const TagScheme& scheme) {
  return score_candidate(model, vocab, src_events, candidate, scheme).log_gen;
}

double score_tag(const Model& model, const text::Vocab& vocab,
                 const std::vector<Event>& src_events,
                 const std::vector<Event>& candidate, const TagScheme& scheme) {
  if (scheme.variant != TagVariant::kIndexed) {
    throw Error(ErrorCode::kInvalidArgument,
                "tag scoring needs the indexed tag scheme");
  }
  return score_candidate(model, vocab, src_events, candidate, scheme).log_tag;
}

// ---- ordering ---------------------------------------------------------

namespace {

std::string canonical(const std::string& s) {
  std::string out;
  for (const auto& tok : text::tokenize(s)) {
    if (!out.empty()) out += ' ';
    out += tok;
  }
  return out;
}

double overlap_f1(const std::vector<std::string>& a,
                  const std::vector<std::string>& b) {
  if (a.empty() || b.empty()) return 0.0;
  std::vector<std::string> sa = a, sb = b;
  std::sort(sa.begin(), sa.end());
  std::sort(sb.begin(), sb.end());
  std::vector<std::string> common;
  std::set_intersection(sa.begin(), sa.end(), sb.begin(), sb.end(),
                        std::back_inserter(common));
  if (common.empty()) return 0.0;
  const double prec = static_cast<double>(common.size()) / static_cast<double>(a.size());
  const double rec = static_cast<double>(common.size()) / static_cast<double>(b.size());
  return 2.0 * prec * rec / (prec + rec);
}

std::vector<int> invert(const std::vector<int>& order) {
  std::vector<int> rank(order.size());
  for (std::size_t r = 0; r < order.size(); ++r) {
    rank[static_cast<std::size_t>(order[r])] = static_cast<int>(r);
  }
  return rank;
}

}  // namespace

Alignment align_output(const std::vector<Event>& input,
                       const std::vector<events::ParsedSegment>& segments,
                       const TagScheme& scheme) {
  const std::size_t n = input.size();
  std::vector<int> seg_to_input(segments.size(), -1);
  std::vector<AlignSource> seg_source(segments.size(), AlignSource::kTag);
  std::vector<char> used(n, 0);

  if (scheme.variant == TagVariant::kIndexed) {
    for (std::size_t s = 0; s < segments.size(); ++s) {
      const auto& tag = segments[s].tag;
      if (!tag || *tag < 1 || static_cast<std::size_t>(*tag) > n) continue;
      const auto i = static_cast<std::size_t>(*tag - 1);
      if (used[i]) continue;
      used[i] = 1;
      seg_to_input[s] = static_cast<int>(i);
    }
  }

  struct Pair {
    double f1;
    std::size_t seg, in;
  };
  std::vector<Pair> pairs;
  std::vector<std::vector<std::string>> input_tokens(n);
  std::vector<std::string> input_pred(n);
  for (std::size_t i = 0; i < n; ++i) {
    input_tokens[i] = text::tokenize(events::render_event(input[i]));
    input_pred[i] = canonical(input[i].predicate());
  }
  for (std::size_t s = 0; s < segments.size(); ++s) {
    if (seg_to_input[s] >= 0 || segments[s].predicate.empty()) continue;
    const auto pred = canonical(segments[s].predicate);
    const auto body = text::tokenize(segments[s].body);
    for (std::size_t i = 0; i < n; ++i) {
      if (used[i] || input_pred[i] != pred) continue;
      pairs.push_back({overlap_f1(body, input_tokens[i]), s, i});
    }
  }
  std::sort(pairs.begin(), pairs.end(), [](const Pair& a, const Pair& b) {
    if (a.f1 != b.f1) return a.f1 > b.f1;
    if (a.seg != b.seg) return a.seg < b.seg;
    return a.in < b.in;
  });
  for (const auto& p : pairs) {
    if (seg_to_input[p.seg] >= 0 || used[p.in]) continue;
    used[p.in] = 1;
    seg_to_input[p.seg] = static_cast<int>(p.in);
    seg_source[p.seg] = AlignSource::kPredicate;
  }

  Alignment a;
  for (std::size_t s = 0; s < segments.size(); ++s) {
    if (seg_to_input[s] < 0) continue;
    a.order.push_back(seg_to_input[s]);
    a.source.push_back(seg_source[s]);
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (used[i]) continue;
    a.order.push_back(static_cast<int>(i));
    a.source.push_back(AlignSource::kAppended);
  }
  return a;
}

OrderingPrediction order_events(const Model& model, const text::Vocab& vocab,
                                const std::vector<Event>& input,
                                const TagScheme& scheme,
                                const DecodeConfig& cfg) {
  if (input.size() < 2) {
    throw Error(ErrorCode::kInvalidArgument, "ordering needs at least 2 events");
  }
  const auto src = encode_input(vocab, input, scheme);
  const auto beams = beam_search(model, src, cfg);
  OrderingPrediction pred;
  if (!beams.empty()) pred.raw_generated = vocab.decode(beams.front().tokens);
  const auto align =
      align_output(input, events::parse_generated(pred.raw_generated, scheme), scheme);
  pred.order = align.order;
  pred.flags = align.source;
  pred.rank = invert(pred.order);
  return pred;
}

OrderingPrediction order_by_scoring(const Model& model,
                                    const text::Vocab& vocab,
                                    const std::vector<Event>& input,
                                    const TagScheme& scheme, ScoreMode mode) {
  if (input.size() > 6) {
    throw Error(ErrorCode::kSizeLimit,
                "exhaustive ordering is limited to 6 events, got " +
                    std::to_string(input.size()));
  }
  if (mode == ScoreMode::kTag && scheme.variant != TagVariant::kIndexed) {
    throw Error(ErrorCode::kInvalidArgument,
                "tag scoring needs the indexed tag scheme");
  }
  std::vector<int> perm(input.size());
  std::iota(perm.begin(), perm.end(), 0);
  std::vector<int> best = perm;
  double best_score = -std::numeric_limits<double>::infinity();
  do {
    std::vector<Event> cand;
    for (int i : perm) cand.push_back(input[static_cast<std::size_t>(i)]);
    const auto s = score_candidate(model, vocab, input, cand, scheme);
    const double v = mode == ScoreMode::kGen ? s.log_gen : s.log_tag;
    if (v > best_score) {
      best_score = v;
      best = perm;
    }
  } while (std::next_permutation(perm.begin(), perm.end()));

  OrderingPrediction pred;
  pred.order = best;
  pred.rank = invert(best);
  pred.flags.assign(best.size(), AlignSource::kTag);
  return pred;
}

// ---- insertion and infilling -----------------------------------------

InsertionRanking rank_insertions(const Model& model, const text::Vocab& vocab,
                                 const std::vector<Event>& seed_events,
                                 const Event& new_event,
                                 const TagScheme& scheme, ScoreMode mode) {
  if (mode == ScoreMode::kTag && scheme.variant != TagVariant::kIndexed) {
    throw Error(ErrorCode::kInvalidArgument,
                "tag scoring needs the indexed tag scheme");
  }
  const std::size_t n = seed_events.size();
  InsertionRanking r;
  for (std::size_t pos = 0; pos <= n; ++pos) {
    std::vector<Event> cand(seed_events.begin(), seed_events.begin() + static_cast<std::ptrdiff_t>(pos));
    cand.push_back(new_event);
    cand.insert(cand.end(), seed_events.begin() + static_cast<std::ptrdiff_t>(pos), seed_events.end());
    const auto s = score_candidate(model, vocab, seed_events, cand, scheme);
    r.gen_scores.push_back(s.log_gen);
    if (scheme.variant == TagVariant::kIndexed) r.tag_scores.push_back(s.log_tag);
  }
  const auto& key = mode == ScoreMode::kGen ? r.gen_scores : r.tag_scores;
  r.ranked_positions.resize(n + 1);
  std::iota(r.ranked_positions.begin(), r.ranked_positions.end(), 0);
  std::stable_sort(r.ranked_positions.begin(), r.ranked_positions.end(),
                   [&](int a, int b) {
                     return key[static_cast<std::size_t>(a)] > key[static_cast<std::size_t>(b)];
                   });
  return r;
}

std::optional<Event> event_from_segment(const events::ParsedSegment& seg) {
  if (seg.malformed || seg.predicate.empty()) return std::nullopt;
  const auto pred = text::tokenize(seg.predicate, false);
  const auto body = text::tokenize(seg.body, false);
  auto join = [](auto first, auto last) {
    std::string s;
    for (auto it = first; it != last; ++it) {
      if (!s.empty()) s += ' ';
      s += *it;
    }
    return s;
  };
  std::vector<events::Constituent> parts;
  const auto hit = std::search(body.begin(), body.end(), pred.begin(), pred.end());
  if (hit != body.end()) {
    const std::string before = join(body.begin(), hit);
    const std::string after = join(hit + static_cast<std::ptrdiff_t>(pred.size()), body.end());
    if (!before.empty()) parts.push_back({events::ConstituentKind::kArgument, "ARG0", before});
    parts.push_back({events::ConstituentKind::kPredicate, "V", join(pred.begin(), pred.end())});
    if (!after.empty()) parts.push_back({events::ConstituentKind::kArgument, "ARG1", after});
  } else {
    parts.push_back({events::ConstituentKind::kPredicate, "V", join(pred.begin(), pred.end())});
    if (!body.empty()) {
      parts.push_back({events::ConstituentKind::kArgument, "ARG1", join(body.begin(), body.end())});
    }
  }
  try {
    return Event(std::move(parts));
  } catch (const Error&) {
    return std::nullopt;
  }
}

InfillResult infill(const Model& model, const text::Vocab& vocab,
                    const InfillQuery& query, const TagScheme& scheme,
                    const DecodeConfig& cfg) {
  cfg.validate();
  const auto& seeds = query.seed_events;
  if (query.position < 0 || static_cast<std::size_t>(query.position) > seeds.size()) {
    throw Error(ErrorCode::kInvalidArgument,
                "infill position " + std::to_string(query.position) +
                    " outside [0, " + std::to_string(seeds.size()) + "]");
  }

  std::set<int> predicate_ban;
  for (const auto& e : seeds) {
    for (int id : vocab.encode(e.predicate())) predicate_ban.insert(id);
  }
  std::set<int> always = cfg.banned_token_ids;
  always.insert(predicate_ban.begin(), predicate_ban.end());
  always.insert({text::kPad, text::kBos, text::kUnk});
  const int vsize = model.config().vocab_size;
  const auto body_mask = ban_mask(vsize, always);
  auto pred_mask = body_mask;
  pred_mask[text::kEos] = 1;
  pred_mask[text::kArg] = 1;
  for (int v = 0; v < vsize; ++v) {
    if (vocab.is_event_tag(v)) pred_mask[static_cast<std::size_t>(v)] = 1;
  }

  const std::vector<Event> prefix_events(seeds.begin(), seeds.begin() + query.position);
  std::vector<std::optional<int>> prefix_map;
  for (int i = 0; i < query.position; ++i) prefix_map.emplace_back(i);
  const auto prefix = vocab.encode(events::render_target(prefix_events, scheme, prefix_map));

  const auto enc = model.encode(encode_input(vocab, seeds, scheme));
  auto state = model.start();
  auto logits = model.step(enc, state, text::kBos);
  for (int tok : prefix) logits = model.step(enc, state, tok);

  Rng rng(cfg.seed);
  std::vector<int> out;
  out.push_back(text::kEvent);
  logits = model.step(enc, state, text::kEvent);
  while (static_cast<int>(out.size()) < cfg.max_decode_len) {
    const auto& mask = out.size() == 1 ? pred_mask : body_mask;
    const int tok = sample_nucleus(row_span(logits), cfg.nucleus_p, mask, rng);
    if (tok == text::kEos || vocab.is_event_tag(tok)) break;
    out.push_back(tok);
    logits = model.step(enc, state, tok);
  }

  std::string raw = vocab.decode(out);
  const auto segs = events::parse_generated(raw, scheme);
  std::optional<Event> ev;
  if (!segs.empty()) ev = event_from_segment(segs.front());
  if (!ev) {
    throw Error(ErrorCode::kParse, "malformed infill generation: \"" + raw + "\"");
  }
  return InfillResult{*std::move(ev), std::move(raw), std::move(out),
                      std::move(predicate_ban)};
}

}  // namespace tempo::decoding
