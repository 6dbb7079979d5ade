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

#include "checkpoint.hpp"

#include <bit>
#include <cstring>
#include <fstream>

#include "error.hpp"

namespace tempo::checkpoint {
namespace {

static_assert(std::endian::native == std::endian::little,
              "checkpoint I/O assumes a little-endian host");

constexpr char kMagic[8] = {'T', 'E', 'M', 'P', 'O', 'C', 'K', '\0'};

void put_u32(std::ostream& out, std::uint32_t v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof v);
}

std::uint32_t get_u32(std::istream& in, const std::string& path) {
  std::uint32_t v = 0;
  if (!in.read(reinterpret_cast<char*>(&v), sizeof v)) {
    throw Error(ErrorCode::kParse, path + ": truncated checkpoint");
  }
  return v;
}

std::string get_bytes(std::istream& in, std::uint32_t n, const std::string& path) {
  std::string s(n, '\0');
  if (n && !in.read(s.data(), n)) {
    throw Error(ErrorCode::kParse, path + ": truncated checkpoint");
  }
  return s;
}

Header read_header_from(std::istream& in, const std::string& path) {
  char magic[8];
  if (!in.read(magic, sizeof magic) || std::memcmp(magic, kMagic, 8) != 0) {
    throw Error(ErrorCode::kParse, path + ": not a checkpoint file");
  }
  Header h;
  h.version = get_u32(in, path);
  if (h.version != kFormatVersion) {
    throw Error(ErrorCode::kParse, path + ": unsupported checkpoint version " +
                                       std::to_string(h.version));
  }
  const auto len = get_u32(in, path);
  try {
    const auto j = nlohmann::json::parse(get_bytes(in, len, path));
    h.kind = j.at("kind").get<std::string>();
    h.config = j.at("config");
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kParse, path + ": bad checkpoint header: " + e.what());
  }
  return h;
}

std::ifstream open_in(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kMissingFile, "cannot open " + path);
  return in;
}

}  // namespace

void save(const std::string& path, const std::string& kind,
          const nlohmann::ordered_json& config,
          const nn::ParameterSet<float>& params) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::kIo, "cannot write " + path);
  out.write(kMagic, sizeof kMagic);
  put_u32(out, kFormatVersion);
  nlohmann::ordered_json header;
  header["kind"] = kind;
  header["config"] = config;
  const std::string text = header.dump();
  put_u32(out, static_cast<std::uint32_t>(text.size()));
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  put_u32(out, static_cast<std::uint32_t>(params.size()));
  for (const auto& p : params) {
    put_u32(out, static_cast<std::uint32_t>(p.name.size()));
    out.write(p.name.data(), static_cast<std::streamsize>(p.name.size()));
    put_u32(out, static_cast<std::uint32_t>(p.value.rows()));
    put_u32(out, static_cast<std::uint32_t>(p.value.cols()));
    out.write(reinterpret_cast<const char*>(p.value.data()),
              static_cast<std::streamsize>(p.value.size() * sizeof(float)));
  }
  if (!out) throw Error(ErrorCode::kIo, "write failed: " + path);
}

Header read_header(const std::string& path) {
  auto in = open_in(path);
  return read_header_from(in, path);
}

void load_into(const std::string& path, const std::string& expected_kind,
               nn::ParameterSet<float>& params) {
  auto in = open_in(path);
  const Header h = read_header_from(in, path);
  if (h.kind != expected_kind) {
    throw Error(ErrorCode::kShapeMismatch, path + ": checkpoint holds a '" +
                                               h.kind + "' model, expected '" +
                                               expected_kind + "'");
  }
  const auto count = get_u32(in, path);
  if (count != params.size()) {
    throw Error(ErrorCode::kShapeMismatch,
                path + ": parameter count " + std::to_string(count) +
                    " does not match model (" + std::to_string(params.size()) +
                    ")");
  }
  for (auto& p : params) {
    const auto name = get_bytes(in, get_u32(in, path), path);
    const auto rows = get_u32(in, path);
    const auto cols = get_u32(in, path);
    if (name != p.name || rows != p.value.rows() || cols != p.value.cols()) {
      throw Error(ErrorCode::kShapeMismatch,
                  path + ": expected " + p.name + " [" +
                      std::to_string(p.value.rows()) + "x" +
                      std::to_string(p.value.cols()) + "], found " + name +
                      " [" + std::to_string(rows) + "x" + std::to_string(cols) +
                      "]");
    }
    if (!in.read(reinterpret_cast<char*>(p.value.data()),
                 static_cast<std::streamsize>(p.value.size() * sizeof(float)))) {
      throw Error(ErrorCode::kParse, path + ": truncated parameter " + name);
    }
    if (!p.value.allFinite()) {
      throw Error(ErrorCode::kNumeric, path + ": non-finite values in " + name);
    }
  }
}

void save_seq2seq(const std::string& path,
                  const seq2seq::Seq2SeqModel<float>& model) {
  save(path, "seq2seq", model.config().to_json(), model.params());
}

seq2seq::Seq2SeqModel<float> load_seq2seq(const std::string& path) {
  const Header h = read_header(path);
  if (h.kind != "seq2seq") {
    throw Error(ErrorCode::kShapeMismatch,
                path + ": expected a seq2seq checkpoint, found " + h.kind);
  }
  seq2seq::Seq2SeqModel<float> model(seq2seq::ModelConfig::from_json(h.config));
  load_into(path, "seq2seq", model.params());
  return model;
}

}  // namespace tempo::checkpoint
