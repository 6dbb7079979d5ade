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

#include "corruption.hpp"

#include <algorithm>
#include <numeric>
#include <set>

#include "error.hpp"

namespace tempo::corruption {

void CorruptionConfig::validate() const {
  if (!(deletion_prob >= 0.0 && deletion_prob <= 1.0)) {
    throw Error(ErrorCode::kInvalidArgument,
                "deletion_prob must lie in [0, 1]");
  }
  if (permutations_per_sequence < 1) {
    throw Error(ErrorCode::kInvalidArgument,
                "permutations_per_sequence must be >= 1");
  }
}

std::vector<std::optional<int>> TrainingExample::target_to_input() const {
  std::vector<std::optional<int>> out(target.events.size());
  for (const auto& [in, tgt] : alignment) out[tgt] = in;
  return out;
}

TrainingExample corrupt_with_order(const events::EventSequence& seq,
                                   const std::vector<int>& order,
                                   double deletion_prob, Rng& rng) {
  const std::size_t n = seq.events.size();
  std::vector<char> keep(n, 1);
  if (deletion_prob > 0.0) {
    for (;;) {
      std::size_t kept = 0;
      for (std::size_t i = 0; i < n; ++i) {
        keep[i] = rng.bernoulli(deletion_prob) ? 0 : 1;
        kept += keep[i];
      }
      if (kept > 0) break;
      if (deletion_prob >= 1.0) {
        // Every redraw would be empty; keep a single uniformly chosen slot.
        std::fill(keep.begin(), keep.end(), 0);
        keep[rng.below(n)] = 1;
        break;
      }
    }
  }
  TrainingExample ex;
  ex.target = seq;
  for (std::size_t i = 0; i < n; ++i) {
    if (!keep[i]) continue;
    const int tgt = order[i];
    ex.alignment.emplace_back(static_cast<int>(ex.input_events.size()), tgt);
    ex.input_events.push_back(seq.events[tgt]);
  }
  return ex;
}

TrainingExample corrupt(const events::EventSequence& seq,
                        const CorruptionConfig& cfg, Rng& rng) {
  cfg.validate();
  if (seq.events.size() < 2) {
    throw Error(ErrorCode::kInvalidArgument,
                "corrupt needs a sequence of at least 2 events");
  }
  std::vector<int> order(seq.events.size());
  std::iota(order.begin(), order.end(), 0);
  rng.shuffle(order);
  return corrupt_with_order(seq, order, cfg.deletion_prob, rng);
}

namespace {

// n! >= k without overflow.
bool has_k_permutations(std::size_t n, int k) {
  double f = 1.0;
  for (std::size_t i = 2; i <= n; ++i) {
    f *= static_cast<double>(i);
    if (f >= k) return true;
  }
  return f >= k;
}

}  // namespace

std::vector<TrainingExample> make_training_set(
    const std::vector<events::EventSequence>& corpus,
    const CorruptionConfig& cfg) {
  cfg.validate();
  std::vector<TrainingExample> out;
  out.reserve(corpus.size() * cfg.permutations_per_sequence);
  for (std::size_t s = 0; s < corpus.size(); ++s) {
    const auto& seq = corpus[s];
    if (seq.events.size() < 2) {
      throw Error(ErrorCode::kInvalidArgument,
                  "sequence '" + seq.source_id + "' has fewer than 2 events");
    }
    Rng rng(derive_seed(cfg.seed, s));
    const bool distinct =
        has_k_permutations(seq.events.size(), cfg.permutations_per_sequence);
    std::set<std::vector<int>> drawn;
    for (int k = 0; k < cfg.permutations_per_sequence; ++k) {
      std::vector<int> order(seq.events.size());
      for (;;) {
        std::iota(order.begin(), order.end(), 0);
        rng.shuffle(order);
        if (!distinct || drawn.insert(order).second) break;
      }
      out.push_back(corrupt_with_order(seq, order, cfg.deletion_prob, rng));
    }
  }
  return out;
}

nlohmann::ordered_json example_to_json(const TrainingExample& ex) {
  nlohmann::ordered_json out;
  auto& in = out["input"] = nlohmann::ordered_json::array();
  for (const auto& e : ex.input_events) in.push_back(events::event_to_json(e));
  auto& tgt = out["target"] = nlohmann::ordered_json::array();
  for (const auto& e : ex.target.events) tgt.push_back(events::event_to_json(e));
  auto& al = out["alignment"] = nlohmann::ordered_json::array();
  for (const auto& [a, b] : ex.alignment) al.push_back({a, b});
  if (!ex.target.source_id.empty()) out["id"] = ex.target.source_id;
  return out;
}

TrainingExample example_from_json(const nlohmann::json& j) {
  TrainingExample ex;
  try {
    for (const auto& e : j.at("input")) {
      ex.input_events.push_back(events::event_from_json(e));
    }
    for (const auto& e : j.at("target")) {
      ex.target.events.push_back(events::event_from_json(e));
    }
    ex.target.source_id = j.value("id", "");
    for (const auto& p : j.at("alignment")) {
      ex.alignment.emplace_back(p.at(0).get<int>(), p.at(1).get<int>());
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kParse, std::string("bad training example: ") + e.what());
  }
  for (const auto& [a, b] : ex.alignment) {
    if (a < 0 || a >= static_cast<int>(ex.input_events.size()) || b < 0 ||
        b >= static_cast<int>(ex.target.events.size())) {
      throw Error(ErrorCode::kParse, "alignment index out of range");
    }
  }
  return ex;
}

OrderingExample to_ordering_example(const TrainingExample& ex) {
  if (ex.target.events.size() != ex.input_events.size()) {
    throw Error(ErrorCode::kInvalidArgument,
                "ordering examples need every event to survive corruption");
  }
  OrderingExample out;
  out.events = ex.input_events;
  out.gold.assign(ex.input_events.size(), -1);
  for (const auto& [in, tgt] : ex.alignment) out.gold[static_cast<std::size_t>(tgt)] = in;
  out.source_id = ex.target.source_id;
  return out;
}

std::vector<OrderingExample> make_ordering_set(
    const std::vector<events::EventSequence>& corpus, int permutations,
    std::uint64_t seed) {
  CorruptionConfig cfg;
  cfg.deletion_prob = 0.0;
  cfg.permutations_per_sequence = permutations;
  cfg.seed = seed;
  std::vector<OrderingExample> out;
  for (const auto& ex : make_training_set(corpus, cfg)) {
    out.push_back(to_ordering_example(ex));
  }
  return out;
}

nlohmann::ordered_json ordering_to_json(const OrderingExample& ex) {
  nlohmann::ordered_json out;
  auto& in = out["input"] = nlohmann::ordered_json::array();
  for (const auto& e : ex.events) in.push_back(events::event_to_json(e));
  out["gold"] = ex.gold;
  if (!ex.source_id.empty()) out["id"] = ex.source_id;
  return out;
}

OrderingExample ordering_from_json(const nlohmann::json& j) {
  OrderingExample ex;
  try {
    for (const auto& e : j.at("input")) ex.events.push_back(events::event_from_json(e));
    ex.gold = j.at("gold").get<std::vector<int>>();
    if (j.contains("id")) ex.source_id = j.at("id").get<std::string>();
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kParse, std::string("ordering example: ") + e.what());
  }
  std::vector<int> sorted = ex.gold;
  std::sort(sorted.begin(), sorted.end());
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    if (sorted[i] != static_cast<int>(i) || sorted.size() != ex.events.size()) {
      throw Error(ErrorCode::kParse, "ordering example gold is not a permutation");
    }
  }
  return ex;
}

}  // namespace tempo::corruption
