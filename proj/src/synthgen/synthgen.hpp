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

// Synthetic clinical-note generator with known ground truth.
//
// Documents are built from sentence templates with {entity:GROUP} slots
// ({entity:*} accepts any group). Entity mention counts follow a Zipf law.
// Each mention may be perturbed by three noise models: an unseen surface
// form, filler words inserted inside a multi-word mention, or a single
// character typo. Noised mentions stay in the gold labels but are excluded
// from the clean labels, which are exactly what the distant labeler can
// recover.
//
// Template file:
//
//   # family: outpatient
//   complaints of {entity:Sign or Symptom} for two days.
//   {entity:*} noted on examination.
//
// "# family: NAME" starts a template family; other '#' lines are comments.
// Families are the unit of the train/test split.

#ifndef MEDEX_SYNTHGEN_SYNTHGEN_HPP_
#define MEDEX_SYNTHGEN_SYNTHGEN_HPP_

#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "common/records.hpp"
#include "kb/kb.hpp"
#include "kb/lexicon.hpp"
#include "textnorm/textnorm.hpp"

namespace medex {

struct NoiseConfig {
  double typo_rate = 0.0;
  double insertion_rate = 0.0;
  double unseen_form_rate = 0.0;
};

struct GenConfig {
  uint64_t seed = 1;
  size_t n_docs = 1000;
  size_t min_entities_per_doc = 1;
  size_t max_entities_per_doc = 3;
  double zipf_exponent = 1.0;
  // Probability of appending one slot-free template to a document.
  double filler_sentence_rate = 0.3;
  NoiseConfig noise;
  std::string template_file;
  std::vector<std::string> filler_words = {"with", "some", "feeling", "mild",
                                           "occasional", "marked"};
  size_t max_term_len = kDefaultMaxTermLen;

  void Validate() const;
};

struct TemplateSlot {
  std::string group;  // "*" for any group
};

struct Template {
  size_t id = 0;
  std::string family;
  // Literal text pieces interleaved with slots: text[0] slot[0] text[1] ...
  std::vector<std::string> text;
  std::vector<TemplateSlot> slots;
};

struct TemplateSet {
  std::vector<Template> templates;
  std::vector<std::string> families;  // in order of first appearance
};

TemplateSet ParseTemplates(std::string_view content, const std::string &source);
TemplateSet LoadTemplates(const std::string &path);

// Entities ordered for Zipf rank assignment: by a seeded hash of the id.
std::vector<std::string> ZipfRanking(const KnowledgeBase &kb, uint64_t seed);

// Target mention count per entity. The total is
// round(n_docs * (min + max) / 2) exactly; the entity at rank r receives a
// share proportional to r^-s, rounded by largest remainder.
std::map<std::string, size_t> FrequencyPlan(const KnowledgeBase &kb,
                                            const GenConfig &config);

struct MentionRecord {
  std::string doc_id;
  std::string entity_id;
  std::string surface;
  bool noised = false;
  std::string noise;  // "+"-joined kinds: unseen, insertion, typo
  size_t template_id = 0;

  bool operator==(const MentionRecord &) const = default;
};

struct GoldCorpus {
  std::vector<RawDocument> documents;  // sorted by doc_id
  std::vector<LabelSet> gold_labels;   // every injected entity
  std::vector<LabelSet> clean_labels;  // entities with an un-noised mention
  std::vector<MentionRecord> mentions;
  // doc_id -> ids of the templates the document was built from.
  std::map<std::string, std::vector<size_t>> templates_used;

  bool operator==(const GoldCorpus &) const = default;
};

// Builds the corpus. Every rendered document is checked against a lexicon
// built from the same KB and pipeline: the labeler must find exactly the
// clean labels, otherwise the document is re-rendered.
GoldCorpus GenerateCorpus(const KnowledgeBase &kb, const TemplateSet &templates,
                          const GenConfig &config,
                          const NormalizationPipeline &pipeline = {});

// Loads config.template_file.
GoldCorpus GenerateCorpus(const KnowledgeBase &kb, const GenConfig &config,
                          const NormalizationPipeline &pipeline = {});

// Partitions template families between train and test: round(f * F) of the
// F families (chosen by seed) go to train. Requires at least two families.
std::pair<GoldCorpus, GoldCorpus> SplitCorpus(const GoldCorpus &corpus,
                                              double train_fraction,
                                              uint64_t seed);

std::string SerializeMentions(const std::vector<MentionRecord> &mentions);

// Writes corpus.jsonl, gold.jsonl, clean.jsonl and mentions.jsonl, each
// prefixed with `prefix`.
void WriteGoldCorpus(const GoldCorpus &corpus, const std::string &dir,
                     const std::string &prefix = "");

// Noise primitives. draw_word and draw_pos are uniform values in [0, 1)
// that pick the affected word (among words of 3+ characters) and position.
// A mention with no eligible word is returned unchanged.
std::string ApplyTypo(const std::string &surface, double draw_word,
                      double draw_pos, bool transpose);
// Inserts the fillers after word gap_index of a multi-word surface.
std::string InsertFillers(const std::string &surface,
                          const std::vector<std::string> &fillers,
                          size_t gap_index);

}  // namespace medex

#endif  // MEDEX_SYNTHGEN_SYNTHGEN_HPP_
