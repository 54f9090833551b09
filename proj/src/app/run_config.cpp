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


#include "app/run_config.hpp"

#include <cerrno>
#include <cstdlib>
#include <filesystem>
#include <set>

#include <fmt/format.h>

#include "common/error.hpp"
#include "common/io.hpp"
#include "common/toml.hpp"

namespace medex {
namespace {

// Typed access to one table; remembers which keys were read so leftovers
// can be reported.
class Section {
 public:
  Section(const toml::Table *table, std::string name, const std::string &source)
      : table_(table), name_(std::move(name)), source_(source) {}

  void Size(const char *key, size_t *out) {
    if (const toml::Value *v = Get(key)) {
      if (v->kind != toml::Value::Kind::kInt || v->i < 0) Bad(*v, key, "a non-negative integer");
      *out = static_cast<size_t>(v->i);
    }
  }
  void U64(const char *key, uint64_t *out) {
    size_t v = *out;
    Size(key, &v);
    *out = v;
  }
  void Real(const char *key, double *out) {
    if (const toml::Value *v = Get(key)) {
      if (v->kind == toml::Value::Kind::kInt) {
        *out = static_cast<double>(v->i);
      } else if (v->kind == toml::Value::Kind::kFloat) {
        *out = v->f;
      } else {
        Bad(*v, key, "a number");
      }
    }
  }
  void String(const char *key, std::string *out) {
    if (const toml::Value *v = Get(key)) {
      if (v->kind != toml::Value::Kind::kString) Bad(*v, key, "a string");
      *out = v->s;
    }
  }
  void Strings(const char *key, std::vector<std::string> *out) {
    if (const toml::Value *v = Get(key)) {
      if (v->kind != toml::Value::Kind::kArray) Bad(*v, key, "an array of strings");
      out->clear();
      for (const toml::Value &e : v->array) {
        if (e.kind != toml::Value::Kind::kString) Bad(e, key, "an array of strings");
        out->push_back(e.s);
      }
    }
  }
  void Sizes(const char *key, std::vector<size_t> *out) {
    if (const toml::Value *v = Get(key)) {
      if (v->kind != toml::Value::Kind::kArray) Bad(*v, key, "an array of integers");
      out->clear();
      for (const toml::Value &e : v->array) {
        if (e.kind != toml::Value::Kind::kInt || e.i < 0) {
          Bad(e, key, "an array of non-negative integers");
        }
        out->push_back(static_cast<size_t>(e.i));
      }
    }
  }

  void RejectUnknown() const {
    if (table_ == nullptr) return;
    for (const auto &[key, value] : *table_) {
      if (used_.count(key) == 0) {
        throw Error(ErrorCode::kInvalidArgument,
                    fmt::format("{}:{}: unknown key \"{}\"{}", source_, value.line, key,
                                name_.empty() ? "" : " in [" + name_ + "]"));
      }
    }
  }

 private:
  const toml::Value *Get(const char *key) {
    if (table_ == nullptr) return nullptr;
    auto it = table_->find(key);
    if (it == table_->end()) return nullptr;
    used_.insert(key);
    return &it->second;
  }

  [[noreturn]] void Bad(const toml::Value &v, const char *key, const char *want) const {
    throw Error(ErrorCode::kInvalidArgument,
                fmt::format("{}:{}: {} must be {}, got {}", source_, v.line, key, want,
                            v.KindName()));
  }

  const toml::Table *table_;
  std::string name_;
  const std::string &source_;
  std::set<std::string> used_;
};

std::string Resolve(const std::string &base_dir, const std::string &path) {
  if (path.empty() || base_dir.empty() || std::filesystem::path(path).is_absolute()) {
    return path;
  }
  return (std::filesystem::path(base_dir) / path).lexically_normal().string();
}

std::string Quote(const std::string &s) {
  std::string out = "\"";
  for (char c : s) {
    if (c == '"' || c == '\\') out += '\\';
    out += c;
  }
  return out + "\"";
}

}  // namespace

void RunConfig::ApplySeed(uint64_t value) {
  seed = value;
  gen.seed = value;
  model.seed = value;
  pretrain.seed = value;
  train.seed = value;
}

void RunConfig::Validate() const {
  auto fail = [](const std::string &what) { throw Error(ErrorCode::kInvalidArgument, what); };
  if (kb.path.empty()) fail("[kb] path is required");
  if (kb.top_k == 0) fail("[kb] top_k must be >= 1");
  if (kb.max_term_len < 1 || kb.max_term_len > kMaxSupportedTermLen) {
    fail(fmt::format("[kb] max_term_len must be in [1, {}]", kMaxSupportedTermLen));
  }
  gen.Validate();
  if (!(train_fraction > 0.0 && train_fraction < 1.0)) {
    fail("[gen] train_fraction must be in (0, 1)");
  }
  if (workers == 0) fail("workers must be >= 1");
  ModelConfig shape = model;  // data-dependent sizes filled with placeholders
  shape.vocab_size = 5;
  shape.n_entities = 1;
  shape.Validate();
  if (min_token_freq == 0) fail("[model] min_token_freq must be >= 1");
  pretrain.Validate();
  train.Validate();
  if (!(eval.threshold > 0.0 && eval.threshold < 1.0)) {
    fail("[eval] threshold must be in (0, 1)");
  }
  if (eval.bins.empty()) fail("[eval] bins must not be empty");
  for (size_t i = 1; i < eval.bins.size(); ++i) {
    if (eval.bins[i] <= eval.bins[i - 1]) fail("[eval] bins must be strictly increasing");
  }
  for (double r : {eval.annotator_miss_rate, eval.annotator_false_positive_rate}) {
    if (!(r >= 0.0 && r <= 1.0)) fail("[eval] annotator rates must be in [0, 1]");
  }
}

RunConfig ParseRunConfig(std::string_view text, const std::string &source,
                         const std::string &base_dir) {
  const toml::Document doc = toml::Parse(text, source);
  static const std::set<std::string> kSections = {"",      "kb",       "gen",  "model",
                                                  "pretrain", "train", "eval"};
  for (const auto &[name, table] : doc) {
    if (kSections.count(name) == 0) {
      throw Error(ErrorCode::kInvalidArgument,
                  fmt::format("{}: unknown section [{}]", source, name));
    }
  }
  auto table = [&](const char *name) -> const toml::Table * {
    auto it = doc.find(name);
    return it == doc.end() ? nullptr : &it->second;
  };

  RunConfig c;
  c.source = source;
  Section top(table(""), "", source);
  uint64_t seed = c.seed;
  top.U64("seed", &seed);
  top.Size("workers", &c.workers);
  top.RejectUnknown();

  Section kb(table("kb"), "kb", source);
  kb.String("path", &c.kb.path);
  kb.String("abbrev", &c.kb.abbrev);
  kb.String("lemmas", &c.kb.lemmas);
  kb.Size("max_term_len", &c.kb.max_term_len);
  kb.Size("top_k", &c.kb.top_k);
  kb.Size("min_test_count", &c.kb.min_test_count);
  kb.RejectUnknown();
  c.kb.path = Resolve(base_dir, c.kb.path);
  c.kb.abbrev = Resolve(base_dir, c.kb.abbrev);
  c.kb.lemmas = Resolve(base_dir, c.kb.lemmas);

  Section gen(table("gen"), "gen", source);
  gen.Size("n_docs", &c.gen.n_docs);
  gen.Size("min_entities_per_doc", &c.gen.min_entities_per_doc);
  gen.Size("max_entities_per_doc", &c.gen.max_entities_per_doc);
  gen.Real("zipf_exponent", &c.gen.zipf_exponent);
  gen.Real("filler_sentence_rate", &c.gen.filler_sentence_rate);
  gen.Real("typo_rate", &c.gen.noise.typo_rate);
  gen.Real("insertion_rate", &c.gen.noise.insertion_rate);
  gen.Real("unseen_form_rate", &c.gen.noise.unseen_form_rate);
  gen.String("templates", &c.gen.template_file);
  gen.Strings("filler_words", &c.gen.filler_words);
  gen.Real("train_fraction", &c.train_fraction);
  gen.RejectUnknown();
  c.gen.template_file = Resolve(base_dir, c.gen.template_file);
  c.gen.max_term_len = c.kb.max_term_len;

  Section model(table("model"), "model", source);
  model.Size("d_model", &c.model.d_model);
  model.Size("n_layers", &c.model.n_layers);
  model.Size("n_heads", &c.model.n_heads);
  model.Size("ffn_dim", &c.model.ffn_dim);
  model.Size("max_seq_len", &c.model.max_seq_len);
  model.Real("head_init_mean", &c.model.head_init_mean);
  model.Real("head_init_std", &c.model.head_init_std);
  model.Real("init_std", &c.model.init_std);
  model.Real("layer_norm_eps", &c.model.layer_norm_eps);
  std::string pooling = PoolingName(c.model.pooling);
  model.String("pooling", &pooling);
  c.model.pooling = ParsePooling(pooling);
  model.Size("min_token_freq", &c.min_token_freq);
  model.RejectUnknown();

  auto adam = [](Section *s, AdamConfig *a) {
    s->Real("learning_rate", &a->learning_rate);
    s->Real("beta1", &a->beta1);
    s->Real("beta2", &a->beta2);
    s->Real("eps", &a->eps);
  };
  Section pre(table("pretrain"), "pretrain", source);
  adam(&pre, &c.pretrain.adam);
  pre.Size("batch_size", &c.pretrain.batch_size);
  pre.Size("steps", &c.pretrain.steps);
  pre.Real("mask_prob", &c.pretrain.mask_prob);
  pre.RejectUnknown();

  Section train(table("train"), "train", source);
  adam(&train, &c.train.adam);
  train.Size("batch_size", &c.train.batch_size);
  train.Size("epochs", &c.train.epochs);
  train.Real("absent_class_weight", &c.train.absent_class_weight);
  train.RejectUnknown();

  Section ev(table("eval"), "eval", source);
  ev.Real("threshold", &c.eval.threshold);
  ev.Sizes("bins", &c.eval.bins);
  std::string averaging = c.eval.averaging == Averaging::kMicro ? "micro" : "macro";
  ev.String("averaging", &averaging);
  if (averaging == "micro") {
    c.eval.averaging = Averaging::kMicro;
  } else if (averaging == "macro") {
    c.eval.averaging = Averaging::kMacro;
  } else {
    throw Error(ErrorCode::kInvalidArgument,
                fmt::format("{}: [eval] averaging must be \"micro\" or \"macro\"", source));
  }
  ev.Size("annotator_docs", &c.eval.annotator_docs);
  ev.Size("annotator_entities", &c.eval.annotator_entities);
  ev.Real("annotator_miss_rate", &c.eval.annotator_miss_rate);
  ev.Real("annotator_false_positive_rate", &c.eval.annotator_false_positive_rate);
  ev.RejectUnknown();
  c.train.predict_threshold = c.eval.threshold;

  c.ApplySeed(seed);
  c.Validate();
  return c;
}

RunConfig LoadRunConfig(const std::string &path) {
  const std::string base = std::filesystem::path(path).parent_path().string();
  RunConfig c = ParseRunConfig(ReadFile(path), path, base.empty() ? "." : base);
  if (const char *env = std::getenv("MEDEX_SEED"); env != nullptr && *env != '\0') {
    char *end = nullptr;
    errno = 0;
    const unsigned long long v = std::strtoull(env, &end, 10);
    if (*end != '\0' || errno == ERANGE || env[0] == '-') {
      throw Error(ErrorCode::kInvalidArgument,
                  fmt::format("MEDEX_SEED=\"{}\" is not an unsigned integer", env));
    }
    c.ApplySeed(v);
  }
  return c;
}

std::string DumpRunConfig(const RunConfig &c) {
  std::string out;
  auto line = [&](const std::string &key, const std::string &value) {
    out += key + " = " + value + "\n";
  };
  auto num = [](double v) {
    std::string s = fmt::format("{}", v);
    if (s.find_first_of(".en") == std::string::npos) s += ".0";
    return s;
  };
  auto list = [](const auto &items, auto fmt_one) {
    std::string s = "[";
    for (size_t i = 0; i < items.size(); ++i) s += (i > 0 ? ", " : "") + fmt_one(items[i]);
    return s + "]";
  };
  line("seed", std::to_string(c.seed));
  line("workers", std::to_string(c.workers));
  out += "\n[kb]\n";
  line("path", Quote(c.kb.path));
  line("abbrev", Quote(c.kb.abbrev));
  line("lemmas", Quote(c.kb.lemmas));
  line("max_term_len", std::to_string(c.kb.max_term_len));
  line("top_k", std::to_string(c.kb.top_k));
  line("min_test_count", std::to_string(c.kb.min_test_count));
  out += "\n[gen]\n";
  line("n_docs", std::to_string(c.gen.n_docs));
  line("min_entities_per_doc", std::to_string(c.gen.min_entities_per_doc));
  line("max_entities_per_doc", std::to_string(c.gen.max_entities_per_doc));
  line("zipf_exponent", num(c.gen.zipf_exponent));
  line("filler_sentence_rate", num(c.gen.filler_sentence_rate));
  line("typo_rate", num(c.gen.noise.typo_rate));
  line("insertion_rate", num(c.gen.noise.insertion_rate));
  line("unseen_form_rate", num(c.gen.noise.unseen_form_rate));
  line("templates", Quote(c.gen.template_file));
  line("filler_words", list(c.gen.filler_words, Quote));
  line("train_fraction", num(c.train_fraction));
  out += "\n[model]\n";
  line("d_model", std::to_string(c.model.d_model));
  line("n_layers", std::to_string(c.model.n_layers));
  line("n_heads", std::to_string(c.model.n_heads));
  line("ffn_dim", std::to_string(c.model.ffn_dim));
  line("max_seq_len", std::to_string(c.model.max_seq_len));
  line("head_init_mean", num(c.model.head_init_mean));
  line("head_init_std", num(c.model.head_init_std));
  line("init_std", num(c.model.init_std));
  line("layer_norm_eps", num(c.model.layer_norm_eps));
  line("pooling", Quote(PoolingName(c.model.pooling)));
  line("min_token_freq", std::to_string(c.min_token_freq));
  auto adam = [&](const AdamConfig &a) {
    line("learning_rate", num(a.learning_rate));
    line("beta1", num(a.beta1));
    line("beta2", num(a.beta2));
    line("eps", num(a.eps));
  };
  out += "\n[pretrain]\n";
  adam(c.pretrain.adam);
  line("batch_size", std::to_string(c.pretrain.batch_size));
  line("steps", std::to_string(c.pretrain.steps));
  line("mask_prob", num(c.pretrain.mask_prob));
  out += "\n[train]\n";
  adam(c.train.adam);
  line("batch_size", std::to_string(c.train.batch_size));
  line("epochs", std::to_string(c.train.epochs));
  line("absent_class_weight", num(c.train.absent_class_weight));
  out += "\n[eval]\n";
  line("threshold", num(c.eval.threshold));
  line("bins", list(c.eval.bins, [](size_t b) { return std::to_string(b); }));
  line("averaging", Quote(c.eval.averaging == Averaging::kMicro ? "micro" : "macro"));
  line("annotator_docs", std::to_string(c.eval.annotator_docs));
  line("annotator_entities", std::to_string(c.eval.annotator_entities));
  line("annotator_miss_rate", num(c.eval.annotator_miss_rate));
  line("annotator_false_positive_rate", num(c.eval.annotator_false_positive_rate));
  return out;
}

}  // namespace medex
