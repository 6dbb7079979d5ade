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

#ifndef TEMPO_CORE_CHECKPOINT_HPP_
#define TEMPO_CORE_CHECKPOINT_HPP_

// Checkpoint container, shared by every model kind:
//
//   bytes 0..7   magic "TEMPOCK\0"
//   u32          format version (1)
//   u32          header length N, then N bytes of JSON {"kind", "config"}
//   u32          parameter count
//   per parameter, in registration order:
//     u32 name length, name bytes, u32 rows, u32 cols,
//     rows*cols little-endian float32 values, row-major
//
// All integers are little-endian.

#include <string>

#include "autograd.hpp"
#include "json.hpp"
#include "seq2seq.hpp"

namespace tempo::checkpoint {

inline constexpr std::uint32_t kFormatVersion = 1;

struct Header {
  std::uint32_t version = 0;
  std::string kind;
  nlohmann::json config;
};

void save(const std::string& path, const std::string& kind,
          const nlohmann::ordered_json& config,
          const nn::ParameterSet<float>& params);

Header read_header(const std::string& path);

// Reads parameter blocks into `params`, which must already have the layout
// implied by the stored config. Names and shapes are validated.
void load_into(const std::string& path, const std::string& expected_kind,
               nn::ParameterSet<float>& params);

void save_seq2seq(const std::string& path,
                  const seq2seq::Seq2SeqModel<float>& model);
seq2seq::Seq2SeqModel<float> load_seq2seq(const std::string& path);

}  // namespace tempo::checkpoint

#endif  // TEMPO_CORE_CHECKPOINT_HPP_
