// Copyright 2026 The Medex Authors.
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

#include "model/checkpoint.hpp"

#include <cstring>

#include <fmt/format.h>
#include <json.hpp>

#include "common/error.hpp"
#include "common/io.hpp"

namespace medex {
namespace {

using json = nlohmann::json;

constexpr char kMagic[] = "MEDEX01";
constexpr size_t kMagicLen = 7;
constexpr int kFormatVersion = 1;

void PutU64(std::string *out, uint64_t v) {
  for (int i = 0; i < 8; ++i) out->push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

void PutU32(std::string *out, uint32_t v) {
  for (int i = 0; i < 4; ++i) out->push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

uint64_t GetLe(const std::string &in, size_t pos, int bytes) {
  uint64_t v = 0;
  for (int i = 0; i < bytes; ++i) {
    v |= static_cast<uint64_t>(static_cast<unsigned char>(in[pos + i])) << (8 * i);
  }
  return v;
}

json ConfigToJson(const ModelConfig &c) {
  return {{"vocab_size", c.vocab_size},
          {"d_model", c.d_model},
          {"n_layers", c.n_layers},
          {"n_heads", c.n_heads},
          {"ffn_dim", c.ffn_dim},
          {"max_seq_len", c.max_seq_len},
          {"n_entities", c.n_entities},
          {"head_init_mean", c.head_init_mean},
          {"head_init_std", c.head_init_std},
          {"init_std", c.init_std},
          {"layer_norm_eps", c.layer_norm_eps},
          {"pooling", PoolingName(c.pooling)},
          {"seed", c.seed}};
}

ModelConfig ConfigFromJson(const json &j) {
  ModelConfig c;
  c.vocab_size = j.at("vocab_size").get<size_t>();
  c.d_model = j.at("d_model").get<size_t>();
  c.n_layers = j.at("n_layers").get<size_t>();
  c.n_heads = j.at("n_heads").get<size_t>();
  c.ffn_dim = j.at("ffn_dim").get<size_t>();
  c.max_seq_len = j.at("max_seq_len").get<size_t>();
  c.n_entities = j.at("n_entities").get<size_t>();
  c.head_init_mean = j.at("head_init_mean").get<double>();
  c.head_init_std = j.at("head_init_std").get<double>();
  c.init_std = j.at("init_std").get<double>();
  c.layer_norm_eps = j.at("layer_norm_eps").get<double>();
  c.pooling = ParsePooling(j.at("pooling").get<std::string>());
  c.seed = j.at("seed").get<uint64_t>();
  return c;
}

// Parameters, then both Adam moments, under prefixed names.
template <class P, class M>
std::vector<std::pair<std::string, M>> AllTensors(P &state) {
  std::vector<std::pair<std::string, M>> out;
  for (auto &[name, m] : state.params.Named()) out.emplace_back(name, m);
  for (auto &[name, m] : state.adam_m.Named()) out.emplace_back("adam_m/" + name, m);
  for (auto &[name, m] : state.adam_v.Named()) out.emplace_back("adam_v/" + name, m);
  return out;
}

}  // namespace

void RequireSameConfig(const ModelConfig &expected, const ModelConfig &found) {
  const json a = ConfigToJson(expected);
  const json b = ConfigToJson(found);
  for (auto it = a.begin(); it != a.end(); ++it) {
    if (b.at(it.key()) != it.value()) {
      throw Error(ErrorCode::kShapeMismatch,
                  fmt::format("checkpoint config mismatch: {} is {}, expected {}",
                              it.key(), b.at(it.key()).dump(), it.value().dump()));
    }
  }
}

std::string SerializeCheckpoint(const Checkpoint &checkpoint) {
  const ModelState &state = checkpoint.state;
  json abbreviations = json::array();
  for (const auto &[key, value] : checkpoint.pipeline.abbreviations()) {
    abbreviations.push_back({JoinTokens(key), JoinTokens(value)});
  }
  json lemmas = json::array();
  for (const auto &[surface, lemma] : checkpoint.pipeline.lemmas()) {
    lemmas.push_back({surface, lemma});
  }
  std::string data;
  json directory = json::array();
  for (const auto &[name, m] : AllTensors<const ModelState, const Mat<float> *>(state)) {
    directory.push_back({{"name", name},
                         {"shape", {m->rows(), m->cols()}},
                         {"offset", data.size()}});
    for (Eigen::Index i = 0; i < m->size(); ++i) {
      uint32_t bits;
      std::memcpy(&bits, m->data() + i, sizeof(bits));
      PutU32(&data, bits);
    }
  }
  const json header = {{"format", "medex-checkpoint"},
                       {"format_version", kFormatVersion},
                       {"config", ConfigToJson(state.config)},
                       {"step", state.step},
                       {"max_seq_len", checkpoint.tokenizer.max_seq_len()},
                       {"vocab", checkpoint.tokenizer.vocab()},
                       {"entities", checkpoint.entities},
                       {"abbreviations", std::move(abbreviations)},
                       {"lemmas", std::move(lemmas)},
                       {"tensors", std::move(directory)}};
  const std::string text = header.dump();
  std::string out(kMagic, kMagicLen);
  PutU64(&out, text.size());
  out += text;
  out += data;
  PutU32(&out, Crc32(out));
  return out;
}

Checkpoint ParseCheckpoint(const std::string &bytes, const std::string &source) {
  if (bytes.size() < kMagicLen + 8 + 4 || bytes.compare(0, kMagicLen, kMagic) != 0) {
    throw Error(ErrorCode::kParse, fmt::format("{}: not a medex checkpoint", source));
  }
  const size_t body = bytes.size() - 4;
  if (Crc32(std::string_view(bytes).substr(0, body)) != GetLe(bytes, body, 4)) {
    throw Error(ErrorCode::kChecksum, fmt::format("{}: checksum mismatch", source));
  }
  const uint64_t header_len = GetLe(bytes, kMagicLen, 8);
  const size_t data_start = kMagicLen + 8 + header_len;
  if (header_len > body || data_start > body) {
    throw Error(ErrorCode::kParse, fmt::format("{}: truncated header", source));
  }
  Checkpoint cp;
  try {
    const json header = json::parse(bytes.substr(kMagicLen + 8, header_len));
    if (header.at("format_version").get<int>() != kFormatVersion) {
      throw Error(ErrorCode::kVersion,
                  fmt::format("{}: unsupported checkpoint version {}", source,
                              header.at("format_version").dump()));
    }
    const ModelConfig config = ConfigFromJson(header.at("config"));
    config.Validate();
    cp.tokenizer = Tokenizer::FromVocab(header.at("vocab").get<std::vector<std::string>>(),
                                        header.at("max_seq_len").get<size_t>());
    cp.entities = header.at("entities").get<std::vector<std::string>>();
    if (cp.tokenizer.size() != config.vocab_size ||
        cp.tokenizer.max_seq_len() != config.max_seq_len ||
        cp.entities.size() != config.n_entities) {
      throw Error(ErrorCode::kShapeMismatch,
                  fmt::format("{}: vocabulary or entity list disagrees with config", source));
    }
    std::vector<std::pair<std::string, std::string>> abbreviations, lemmas;
    for (const json &row : header.at("abbreviations")) {
      abbreviations.emplace_back(row.at(0).get<std::string>(), row.at(1).get<std::string>());
    }
    for (const json &row : header.at("lemmas")) {
      lemmas.emplace_back(row.at(0).get<std::string>(), row.at(1).get<std::string>());
    }
    cp.pipeline = NormalizationPipeline::Create(abbreviations, lemmas);

    cp.state.config = config;
    cp.state.step = header.at("step").get<uint64_t>();
    cp.state.params = Parameters<float>::Zeros(config);
    cp.state.adam_m = Parameters<float>::Zeros(config);
    cp.state.adam_v = Parameters<float>::Zeros(config);
    const json &directory = header.at("tensors");
    auto tensors = AllTensors<ModelState, Mat<float> *>(cp.state);
    if (directory.size() != tensors.size()) {
      throw Error(ErrorCode::kShapeMismatch,
                  fmt::format("{}: {} tensors, config implies {}", source,
                              directory.size(), tensors.size()));
    }
    for (size_t t = 0; t < tensors.size(); ++t) {
      const json &entry = directory[t];
      Mat<float> *m = tensors[t].second;
      if (entry.at("name").get<std::string>() != tensors[t].first ||
          entry.at("shape").at(0).get<Eigen::Index>() != m->rows() ||
          entry.at("shape").at(1).get<Eigen::Index>() != m->cols()) {
        throw Error(ErrorCode::kShapeMismatch,
                    fmt::format("{}: tensor {} does not match config", source,
                                entry.at("name").dump()));
      }
      const size_t offset = data_start + entry.at("offset").get<size_t>();
      if (offset + 4 * static_cast<size_t>(m->size()) > body) {
        throw Error(ErrorCode::kParse,
                    fmt::format("{}: tensor {} runs past the end", source,
                                tensors[t].first));
      }
      for (Eigen::Index i = 0; i < m->size(); ++i) {
        const uint32_t bits = static_cast<uint32_t>(GetLe(bytes, offset + 4 * i, 4));
        std::memcpy(m->data() + i, &bits, sizeof(bits));
      }
    }
  } catch (const json::exception &e) {
    throw Error(ErrorCode::kParse, fmt::format("{}: bad checkpoint header: {}", source, e.what()));
  }
  return cp;
}

void SaveCheckpoint(const Checkpoint &checkpoint, const std::string &path) {
  WriteFile(path, SerializeCheckpoint(checkpoint));
}

Checkpoint LoadCheckpoint(const std::string &path, const std::optional<ModelConfig> &expected) {
  Checkpoint cp = ParseCheckpoint(ReadFile(path), path);
  if (expected.has_value()) RequireSameConfig(*expected, cp.state.config);
  return cp;
}

}  // namespace medex
