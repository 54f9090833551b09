/* Copyright 2026 The Medex Authors.
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

/* C interface to the medex toolkit. Objects are opaque handles released
 * with the matching *_free function. Functions that can fail return a
 * medex_status; on failure medex_last_error() describes the problem for
 * the calling thread. Strings are UTF-8; returned pointers stay valid
 * until the owning handle is freed. */

#ifndef MEDEX_MEDEX_H_
#define MEDEX_MEDEX_H_

#include <stddef.h>
#include <stdint.h>

#if defined(MEDEX_BUILDING_LIBRARY)
#define MEDEX_API __attribute__((visibility("default")))
#else
#define MEDEX_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum medex_status {
  MEDEX_OK = 0,
  MEDEX_ERR_INVALID_ARGUMENT = 1,
  MEDEX_ERR_IO = 2,
  MEDEX_ERR_PARSE = 3,
  MEDEX_ERR_VALIDATION = 4,
  MEDEX_ERR_CHECKSUM = 5,
  MEDEX_ERR_VERSION = 6,
  MEDEX_ERR_SHAPE_MISMATCH = 7,
  MEDEX_ERR_NUMERIC = 8,
  MEDEX_ERR_INTERNAL = 100
} medex_status;

MEDEX_API const char *medex_version(void);
MEDEX_API const char *medex_status_name(medex_status status);
MEDEX_API const char *medex_last_error(void);

/* Receives progress lines from long-running calls. NULL disables logging. */
typedef void (*medex_log_fn)(const char *line, void *user);
MEDEX_API void medex_set_log(medex_log_fn fn, void *user);

/* Knowledge base. */
typedef struct medex_kb medex_kb;
MEDEX_API medex_status medex_kb_load(const char *path, medex_kb **out);
MEDEX_API size_t medex_kb_size(const medex_kb *kb);
MEDEX_API void medex_kb_free(medex_kb *kb);

/* Matching lexicon. abbrev_path and lemma_path may be NULL. */
typedef struct medex_lexicon medex_lexicon;
MEDEX_API medex_status medex_lexicon_build(const medex_kb *kb, const char *abbrev_path,
                                           const char *lemma_path, size_t max_term_len,
                                           medex_lexicon **out);
MEDEX_API medex_status medex_lexicon_load(const char *path, medex_lexicon **out);
MEDEX_API medex_status medex_lexicon_save(const medex_lexicon *lexicon, const char *path);
MEDEX_API size_t medex_lexicon_size(const medex_lexicon *lexicon);
/* Synonyms skipped while building (too long, or empty after normalization). */
MEDEX_API size_t medex_lexicon_warning_count(const medex_lexicon *lexicon);
MEDEX_API const char *medex_lexicon_warning(const medex_lexicon *lexicon, size_t i);
MEDEX_API void medex_lexicon_free(medex_lexicon *lexicon);

/* Labels a corpus JSONL file into a labels JSONL file. n_docs may be NULL. */
MEDEX_API medex_status medex_label_file(const medex_lexicon *lexicon, const char *corpus_path,
                                        const char *labels_path, size_t workers,
                                        size_t *n_docs);

/* Writes entity_id<TAB>document count for a labels JSONL file. */
MEDEX_API medex_status medex_count_labels(const char *labels_path, const char *counts_path);

/* Run configuration (TOML). MEDEX_SEED in the environment overrides the
 * seed at load time. */
typedef struct medex_config medex_config;
MEDEX_API medex_status medex_config_load(const char *path, medex_config **out);
MEDEX_API uint64_t medex_config_seed(const medex_config *config);
MEDEX_API medex_status medex_config_set_seed(medex_config *config, uint64_t seed);
MEDEX_API medex_status medex_config_set_workers(medex_config *config, size_t workers);
MEDEX_API medex_status medex_config_set_kb_path(medex_config *config, const char *path);
MEDEX_API void medex_config_free(medex_config *config);

/* Synthetic corpus: writes corpus/gold/clean/mentions JSONL for the whole
 * corpus and with train_ and test_ prefixes for the family split.
 * n_docs may be NULL. */
MEDEX_API medex_status medex_generate(const medex_config *config, const char *out_dir,
                                      size_t *n_docs);

/* Classifier with its tokenizer, class list and normalization tables. */
typedef struct medex_model medex_model;
/* Classes are the top-k entities of the training labels, filtered by test
 * frequency when test_labels_path is not NULL. */
MEDEX_API medex_status medex_model_create(const medex_config *config, const char *corpus_path,
                                          const char *labels_path,
                                          const char *test_labels_path, medex_model **out);
MEDEX_API medex_status medex_model_pretrain(medex_model *model, const medex_config *config,
                                            const char *corpus_path);
MEDEX_API medex_status medex_model_train(medex_model *model, const medex_config *config,
                                         const char *corpus_path, const char *labels_path);
MEDEX_API medex_status medex_model_save(const medex_model *model, const char *path);
MEDEX_API medex_status medex_model_load(const char *path, medex_model **out);
MEDEX_API size_t medex_model_num_classes(const medex_model *model);
MEDEX_API uint64_t medex_model_steps(const medex_model *model);
MEDEX_API medex_status medex_model_predict_file(const medex_model *model,
                                                const char *corpus_path,
                                                const char *out_path, double threshold,
                                                size_t workers);
MEDEX_API void medex_model_free(medex_model *model);

/* Reports. format is "csv", "tsv" or "plot-data" (recall only); out_path
 * "-" writes to standard output. */
MEDEX_API medex_status medex_eval_recall(const medex_kb *classes, const char *preds_path,
                                         const char *labels_path,
                                         const char *train_counts_path, const size_t *bins,
                                         size_t n_bins, int macro, const char *format,
                                         const char *out_path);
/* kb and train_counts_path may be NULL; they add names and example counts. */
MEDEX_API medex_status medex_eval_discrepancy(const medex_kb *kb, const char *preds_path,
                                              const char *annotator_path,
                                              const char *gold_path,
                                              const char *const *entities, size_t n_entities,
                                              const char *train_counts_path,
                                              const char *format, const char *out_path);
/* Per-group term and instance counts; test_labels_path may be NULL. */
MEDEX_API medex_status medex_eval_counts(const medex_kb *kb, const char *train_labels_path,
                                         const char *test_labels_path, const char *format,
                                         const char *out_path);

/* End-to-end run. */
typedef struct medex_run medex_run;

typedef struct medex_recall_row {
  const char *group;
  size_t bin_threshold;
  size_t n_entities;
  size_t n_positives;
  size_t n_matched;
  int has_recall;
  double recall;
} medex_recall_row;

MEDEX_API medex_status medex_pipeline_run(const medex_config *config, const char *out_dir,
                                          medex_run **out);
MEDEX_API size_t medex_run_num_classes(const medex_run *run);
MEDEX_API size_t medex_run_recall_count(const medex_run *run);
MEDEX_API medex_status medex_run_recall_row(const medex_run *run, size_t i,
                                            medex_recall_row *out);
MEDEX_API size_t medex_run_output_count(const medex_run *run);
/* Output file name and its SHA-256, in name order. */
MEDEX_API medex_status medex_run_output(const medex_run *run, size_t i, const char **name,
                                        const char **sha256);
MEDEX_API const char *medex_run_manifest_path(const medex_run *run);
MEDEX_API void medex_run_free(medex_run *run);

#ifdef __cplusplus
}
#endif

#endif /* MEDEX_MEDEX_H_ */
