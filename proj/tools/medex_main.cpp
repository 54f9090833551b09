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


// medex command-line tool. Talks to the library only through medex.h.

#include <cstdio>
#include <cstdlib>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "medex/medex.h"

namespace {

constexpr int kExitUser = 1;
constexpr int kExitInternal = 2;

class Failure {
 public:
  explicit Failure(medex_status status) : status_(status) {}
  medex_status status() const { return status_; }

 private:
  medex_status status_;
};

void Check(medex_status status) {
  if (status != MEDEX_OK) throw Failure(status);
}

void PrintLog(const char *line, void *) { std::fprintf(stderr, "medex: %s\n", line); }

// Owning wrappers for the C handles.
template <class T, void (*Free)(T *)>
struct Handle {
  T *p = nullptr;
  Handle() = default;
  Handle(const Handle &) = delete;
  Handle &operator=(const Handle &) = delete;
  ~Handle() { Free(p); }
};

using Kb = Handle<medex_kb, medex_kb_free>;
using Lexicon = Handle<medex_lexicon, medex_lexicon_free>;
using Config = Handle<medex_config, medex_config_free>;
using Model = Handle<medex_model, medex_model_free>;
using Run = Handle<medex_run, medex_run_free>;

const char *OrNull(const std::string &s) { return s.empty() ? nullptr : s.c_str(); }

std::vector<std::string> SplitList(const std::string &s) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : s) {
    if (c == ',') {
      if (!cur.empty()) out.push_back(cur);
      cur.clear();
    } else if (c != ' ') {
      cur += c;
    }
  }
  if (!cur.empty()) out.push_back(cur);
  return out;
}

void LoadConfig(const std::string &path, size_t workers, Config *config) {
  Check(medex_config_load(path.c_str(), &config->p));
  if (workers > 0) Check(medex_config_set_workers(config->p, workers));
}

}  // namespace

int main(int argc, char **argv) {
  CLI::App app{"Medical entity extraction with distant supervision."};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string("medex ") + medex_version());
  bool quiet = false;
  app.add_flag("-q,--quiet", quiet, "Suppress progress lines on stderr");

  // kb build
  CLI::App *kb_cmd = app.add_subcommand("kb", "Knowledge base tools");
  kb_cmd->require_subcommand(1);
  CLI::App *kb_build = kb_cmd->add_subcommand("build", "Build the matching lexicon");
  std::string kb_path, abbrev, lemmas, lexicon_out;
  size_t max_term_len = 7;
  kb_build->add_option("--kb", kb_path, "Knowledge base JSONL")->required();
  kb_build->add_option("--abbrev", abbrev, "Abbreviation table (TSV)");
  kb_build->add_option("--lemmas", lemmas, "Lemma table (TSV)");
  kb_build->add_option("--max-term-len", max_term_len, "Longest synonym in tokens")
      ->capture_default_str();
  kb_build->add_option("--out", lexicon_out, "Lexicon output path")->required();

  // gen
  CLI::App *gen = app.add_subcommand("gen", "Generate a synthetic corpus");
  std::string config_path, out_dir, gen_kb;
  gen->add_option("--kb", gen_kb, "Knowledge base (overrides [kb] path)");
  gen->add_option("--config", config_path, "Run config (TOML)")->required();
  gen->add_option("--out-dir", out_dir, "Output directory")->required();

  // label
  CLI::App *label = app.add_subcommand("label", "Label a corpus against a lexicon");
  std::string lexicon_path, in_path, out_path;
  size_t workers = 0;
  label->add_option("--lexicon", lexicon_path, "Lexicon built by 'kb build'")->required();
  label->add_option("--in", in_path, "Corpus JSONL")->required();
  label->add_option("--out", out_path, "Labels JSONL")->required();
  std::string counts_out;
  label->add_option("--counts", counts_out, "Also write per-entity document counts (TSV)");
  label->add_option("--workers", workers, "Worker threads")->check(CLI::PositiveNumber);

  // pretrain / train
  std::string corpus_path, labels_path, test_labels_path, init_path;
  CLI::App *pretrain = app.add_subcommand("pretrain", "Masked-LM pretraining");
  CLI::App *train = app.add_subcommand("train", "Train the entity classifier");
  for (CLI::App *cmd : {pretrain, train}) {
    cmd->add_option("--config", config_path, "Run config (TOML)")->required();
    cmd->add_option("--corpus", corpus_path, "Training corpus JSONL")->required();
    cmd->add_option("--labels", labels_path, "Training labels JSONL")->required();
    cmd->add_option("--test-labels", test_labels_path,
                    "Test labels, for the minimum test frequency filter");
    cmd->add_option("--init", init_path, "Start from this checkpoint");
    cmd->add_option("--out", out_path, "Checkpoint output path")->required();
  }

  // predict
  CLI::App *predict = app.add_subcommand("predict", "Predict entities for a corpus");
  std::string model_path;
  double threshold = 0.5;
  predict->add_option("--model", model_path, "Checkpoint")->required();
  predict->add_option("--in", in_path, "Corpus JSONL")->required();
  predict->add_option("--out", out_path, "Predictions JSONL ('-' for stdout)")->required();
  predict->add_option("--threshold", threshold, "Probability threshold")
      ->capture_default_str();
  predict->add_option("--workers", workers, "Worker threads")->check(CLI::PositiveNumber);

  // eval
  CLI::App *eval = app.add_subcommand("eval", "Evaluation reports");
  eval->require_subcommand(1);
  std::string preds_path, counts_path, format = "csv", bins = "0,500,2500,50000";
  std::string annotator_path, gold_path, entities, test_path;
  bool macro = false;
  out_path = "-";
  CLI::App *recall = eval->add_subcommand("recall", "Recall by training frequency bin");
  recall->add_option("--kb", kb_path, "Entity classes (KB JSONL)")->required();
  recall->add_option("--preds", preds_path, "Predictions JSONL")->required();
  recall->add_option("--labels", labels_path, "Reference labels JSONL")->required();
  recall->add_option("--train-counts", counts_path, "Training counts TSV")->required();
  recall->add_option("--bins", bins, "Comma-separated thresholds")->capture_default_str();
  recall->add_flag("--macro", macro, "Average per entity instead of per instance");
  recall->add_option("--format", format, "csv, tsv or plot-data")->capture_default_str();
  recall->add_option("--out", out_path, "Output path ('-' for stdout)");

  CLI::App *disc = eval->add_subcommand("discrepancy", "Model/annotator discrepancy table");
  disc->add_option("--kb", kb_path, "Knowledge base, for names and groups");
  disc->add_option("--preds", preds_path, "Model predictions JSONL")->required();
  disc->add_option("--annotator", annotator_path, "Annotator labels JSONL")->required();
  disc->add_option("--gold", gold_path, "Gold labels JSONL")->required();
  disc->add_option("--entities", entities, "Comma-separated entity ids")->required();
  disc->add_option("--train-counts", counts_path, "Training counts TSV");
  disc->add_option("--format", format, "csv or tsv")->capture_default_str();
  disc->add_option("--out", out_path, "Output path ('-' for stdout)");

  CLI::App *counts = eval->add_subcommand("counts", "Per-group term and instance counts");
  counts->add_option("--kb", kb_path, "Knowledge base JSONL")->required();
  counts->add_option("--train-labels", labels_path, "Training labels JSONL")->required();
  counts->add_option("--test-labels", test_path, "Test labels JSONL");
  counts->add_option("--format", format, "csv or tsv")->capture_default_str();
  counts->add_option("--out", out_path, "Output path ('-' for stdout)");

  // pipeline
  CLI::App *pipeline = app.add_subcommand("pipeline", "Run every stage from one config");
  pipeline->add_option("--config", config_path, "Run config (TOML)")->required();
  std::string run_dir = "medex_run";
  pipeline->add_option("--out-dir", run_dir, "Output directory")->capture_default_str();
  pipeline->add_option("--workers", workers, "Worker threads")->check(CLI::PositiveNumber);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp &e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp &e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion &e) {
    return app.exit(e);
  } catch (const CLI::ParseError &e) {
    // Name stray arguments first; otherwise a missing required option
    // would hide a mistyped one.
    const std::vector<std::string> extra = app.remaining(true);
    if (!extra.empty()) {
      std::fprintf(stderr, "error: unknown argument \"%s\"\n%s", extra.front().c_str(),
                   app.help().c_str());
      return kExitUser;
    }
    app.exit(e);
    return kExitUser;
  }
  if (!quiet) medex_set_log(PrintLog, nullptr);

  try {
    if (*kb_build) {
      Kb kb;
      Lexicon lex;
      Check(medex_kb_load(kb_path.c_str(), &kb.p));
      Check(medex_lexicon_build(kb.p, OrNull(abbrev), OrNull(lemmas), max_term_len, &lex.p));
      for (size_t i = 0; i < medex_lexicon_warning_count(lex.p); ++i) {
        std::fprintf(stderr, "warning: %s\n", medex_lexicon_warning(lex.p, i));
      }
      Check(medex_lexicon_save(lex.p, lexicon_out.c_str()));
      std::fprintf(stderr, "lexicon: %zu entities, %zu keys -> %s\n", medex_kb_size(kb.p),
                   medex_lexicon_size(lex.p), lexicon_out.c_str());
    } else if (*gen) {
      Config config;
      LoadConfig(config_path, 0, &config);
      if (!gen_kb.empty()) Check(medex_config_set_kb_path(config.p, gen_kb.c_str()));
      Check(medex_generate(config.p, out_dir.c_str(), nullptr));
    } else if (*label) {
      Lexicon lex;
      Check(medex_lexicon_load(lexicon_path.c_str(), &lex.p));
      Check(medex_label_file(lex.p, in_path.c_str(), out_path.c_str(),
                             workers > 0 ? workers : 1, nullptr));
      if (!counts_out.empty()) Check(medex_count_labels(out_path.c_str(), counts_out.c_str()));
    } else if (*pretrain || *train) {
      Config config;
      LoadConfig(config_path, 0, &config);
      Model model;
      if (!init_path.empty()) {
        Check(medex_model_load(init_path.c_str(), &model.p));
      } else {
        Check(medex_model_create(config.p, corpus_path.c_str(), labels_path.c_str(),
                                 OrNull(test_labels_path), &model.p));
      }
      if (*pretrain) {
        Check(medex_model_pretrain(model.p, config.p, corpus_path.c_str()));
      } else {
        Check(medex_model_train(model.p, config.p, corpus_path.c_str(), labels_path.c_str()));
      }
      Check(medex_model_save(model.p, out_path.c_str()));
    } else if (*predict) {
      Model model;
      Check(medex_model_load(model_path.c_str(), &model.p));
      Check(medex_model_predict_file(model.p, in_path.c_str(), out_path.c_str(), threshold,
                                     workers > 0 ? workers : 1));
    } else if (*recall) {
      std::vector<size_t> thresholds;
      for (const std::string &b : SplitList(bins)) {
        size_t used = 0;
        unsigned long long v = 0;
        try {
          v = std::stoull(b, &used);
        } catch (const std::exception &) {
          used = 0;
        }
        if (used != b.size() || b[0] == '-') {
          std::fprintf(stderr, "error: --bins: \"%s\" is not a count\n", b.c_str());
          return kExitUser;
        }
        thresholds.push_back(v);
      }
      Kb kb;
      Check(medex_kb_load(kb_path.c_str(), &kb.p));
      Check(medex_eval_recall(kb.p, preds_path.c_str(), labels_path.c_str(),
                              counts_path.c_str(), thresholds.data(), thresholds.size(),
                              macro ? 1 : 0, format.c_str(), out_path.c_str()));
    } else if (*disc) {
      Kb kb;
      if (!kb_path.empty()) Check(medex_kb_load(kb_path.c_str(), &kb.p));
      const std::vector<std::string> ids = SplitList(entities);
      std::vector<const char *> ptrs;
      for (const std::string &id : ids) ptrs.push_back(id.c_str());
      Check(medex_eval_discrepancy(kb.p, preds_path.c_str(), annotator_path.c_str(),
                                   gold_path.c_str(), ptrs.data(), ptrs.size(),
                                   OrNull(counts_path), format.c_str(), out_path.c_str()));
    } else if (*counts) {
      Kb kb;
      Check(medex_kb_load(kb_path.c_str(), &kb.p));
      Check(medex_eval_counts(kb.p, labels_path.c_str(), OrNull(test_path), format.c_str(),
                              out_path.c_str()));
    } else if (*pipeline) {
      Config config;
      LoadConfig(config_path, workers, &config);
      Run run;
      Check(medex_pipeline_run(config.p, run_dir.c_str(), &run.p));
      std::printf("%s\n", medex_run_manifest_path(run.p));
    }
  } catch (const Failure &f) {
    std::fprintf(stderr, "error: %s: %s\n", medex_status_name(f.status()), medex_last_error());
    return f.status() == MEDEX_ERR_INTERNAL || f.status() == MEDEX_ERR_NUMERIC ? kExitInternal
                                                                               : kExitUser;
  }
  return 0;
}
