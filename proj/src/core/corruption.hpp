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

#ifndef TEMPO_CORE_CORRUPTION_HPP_
#define TEMPO_CORE_CORRUPTION_HPP_

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "events.hpp"
#include "json.hpp"
#include "rng.hpp"

namespace tempo::corruption {

struct CorruptionConfig {
  double deletion_prob = 0.15;
  int permutations_per_sequence = 2;
  std::uint64_t seed = 13;

  void validate() const;
};

// Denoising pair: a shuffled, possibly thinned copy of the target.
struct TrainingExample {
  std::vector<events::Event> input_events;
  events::EventSequence target;
  // (input position, target position) for every surviving event.
  std::vector<std::pair<int, int>> alignment;

  // Target position -> input slot, empty for deleted events.
  std::vector<std::optional<int>> target_to_input() const;
};

// Shuffles, then deletes each event independently with the configured
// probability; an all-deleted mask is redrawn.
TrainingExample corrupt(const events::EventSequence& seq,
                        const CorruptionConfig& cfg, Rng& rng);

// As above with a caller-chosen shuffle order (order[i] = target position of
// input slot i before deletion).
TrainingExample corrupt_with_order(const events::EventSequence& seq,
                                   const std::vector<int>& order,
                                   double deletion_prob, Rng& rng);

std::vector<TrainingExample> make_training_set(
    const std::vector<events::EventSequence>& corpus,
    const CorruptionConfig& cfg);

nlohmann::ordered_json example_to_json(const TrainingExample& ex);
TrainingExample example_from_json(const nlohmann::json& j);

// A scrambled sequence with nothing deleted, used by ordering evaluation and
// the discriminative baselines.
struct OrderingExample {
  std::vector<events::Event> events;  // scrambled input
  std::vector<int> gold;              // temporal rank -> input index
  std::string source_id;
};

OrderingExample to_ordering_example(const TrainingExample& ex);

// `permutations` distinct scrambles per sequence (when enough exist).
std::vector<OrderingExample> make_ordering_set(
    const std::vector<events::EventSequence>& corpus, int permutations,
    std::uint64_t seed);

nlohmann::ordered_json ordering_to_json(const OrderingExample& ex);
OrderingExample ordering_from_json(const nlohmann::json& j);

}  // namespace tempo::corruption

#endif  // TEMPO_CORE_CORRUPTION_HPP_
