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

#include "synthgen/synthgen.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <numeric>
#include <random>
#include <set>

#include <fmt/format.h>
#include <json.hpp>

#include "common/error.hpp"
#include "common/io.hpp"
#include "common/utf8.hpp"
#include "labeler/labeler.hpp"

namespace medex {

using nlohmann::json;

void GenConfig::Validate() const {
  if (n_docs < 1) throw Error(ErrorCode::kInvalidArgument, "n_docs must be >= 1");
  if (min_entities_per_doc > max_entities_per_doc) {
    throw Error(ErrorCode::kInvalidArgument,
                "min_entities_per_doc exceeds max_entities_per_doc");
  }
  if (!(zipf_exponent > 0.0) || !std::isfinite(zipf_exponent)) {
    throw Error(ErrorCode::kInvalidArgument, "zipf_exponent must be > 0");
  }
  auto check_rate = [](double r, const char *name) {
    if (!(r >= 0.0 && r <= 1.0)) {
      throw Error(ErrorCode::kInvalidArgument,
                  fmt::format("{} must be in [0, 1]", name));
    }
  };
  check_rate(noise.typo_rate, "typo_rate");
  check_rate(noise.insertion_rate, "insertion_rate");
  check_rate(noise.unseen_form_rate, "unseen_form_rate");
  check_rate(filler_sentence_rate, "filler_sentence_rate");
  if (max_term_len < 1 || max_term_len > kMaxSupportedTermLen) {
    throw Error(ErrorCode::kInvalidArgument, "bad max_term_len");
  }
  if (noise.insertion_rate > 0 && filler_words.empty()) {
    throw Error(ErrorCode::kInvalidArgument,
                "insertion noise needs at least one filler word");
  }
}

namespace {

std::string Trim(std::string_view s) {
  const size_t b = s.find_first_not_of(" \t");
  if (b == std::string_view::npos) return "";
  const size_t e = s.find_last_not_of(" \t");
  return std::string(s.substr(b, e - b + 1));
}

std::vector<std::string> SplitWords(const std::string &s) {
  std::vector<std::string> words;
  size_t i = 0;
  while (i < s.size()) {
    while (i < s.size() && s[i] == ' ') ++i;
    size_t j = i;
    while (j < s.size() && s[j] != ' ') ++j;
    if (j > i) words.push_back(s.substr(i, j - i));
    i = j;
  }
  return words;
}

std::string JoinWords(const std::vector<std::string> &words) {
  std::string out;
  for (size_t i = 0; i < words.size(); ++i) {
    if (i > 0) out += ' ';
    out += words[i];
  }
  return out;
}

uint64_t SeededHash(uint64_t seed, std::string_view id) {
  uint64_t h = 1469598103934665603ull;
  auto mix = [&h](unsigned char c) {
    h ^= c;
    h *= 1099511628211ull;
  };
  for (int i = 0; i < 8; ++i) mix(static_cast<unsigned char>(seed >> (8 * i)));
  for (char c : id) mix(static_cast<unsigned char>(c));
  return h;
}

}  // namespace

TemplateSet ParseTemplates(std::string_view content, const std::string &source) {
  TemplateSet set;
  std::string family = "default";
  size_t lineno = 0;
  size_t pos = 0;
  while (pos <= content.size()) {
    size_t end = content.find('\n', pos);
    if (end == std::string_view::npos) end = content.size();
    std::string line = Trim(content.substr(pos, end - pos));
    pos = end + 1;
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (line.front() == '#') {
      std::string rest = Trim(std::string_view(line).substr(1));
      if (rest.rfind("family:", 0) == 0) {
        family = Trim(std::string_view(rest).substr(7));
        if (family.empty()) {
          throw Error(ErrorCode::kParse,
                      fmt::format("{}:{}: empty family name", source, lineno));
        }
      }
      continue;
    }
    Template t;
    t.id = set.templates.size();
    t.family = family;
    std::string text;
    size_t i = 0;
    while (i < line.size()) {
      if (line[i] != '{') {
        text += line[i++];
        continue;
      }
      const size_t close = line.find('}', i);
      if (close == std::string::npos) {
        throw Error(ErrorCode::kParse,
                    fmt::format("{}:{}: unterminated slot", source, lineno));
      }
      const std::string body = line.substr(i + 1, close - i - 1);
      std::string group;
      if (body == "entity") {
        group = "*";
      } else if (body.rfind("entity:", 0) == 0) {
        group = Trim(std::string_view(body).substr(7));
      }
      if (group.empty()) {
        throw Error(ErrorCode::kParse,
                    fmt::format("{}:{}: unknown slot {{{}}}", source, lineno,
                                body));
      }
      t.text.push_back(std::move(text));
      text.clear();
      t.slots.push_back(TemplateSlot{group});
      i = close + 1;
    }
    t.text.push_back(std::move(text));
    if (std::find(set.families.begin(), set.families.end(), family) ==
        set.families.end()) {
      set.families.push_back(family);
    }
    set.templates.push_back(std::move(t));
  }
  return set;
}

TemplateSet LoadTemplates(const std::string &path) {
  return ParseTemplates(ReadFile(path), path);
}

std::vector<std::string> ZipfRanking(const KnowledgeBase &kb, uint64_t seed) {
  std::vector<std::pair<uint64_t, std::string>> keyed;
  for (const Entity &e : kb.entities()) {
    keyed.emplace_back(SeededHash(seed, e.id), e.id);
  }
  std::sort(keyed.begin(), keyed.end());
  std::vector<std::string> ranking;
  for (auto &[h, id] : keyed) ranking.push_back(std::move(id));
  return ranking;
}

std::map<std::string, size_t> FrequencyPlan(const KnowledgeBase &kb,
                                            const GenConfig &config) {
  config.Validate();
  if (kb.empty()) {
    throw Error(ErrorCode::kInvalidArgument, "knowledge base is empty");
  }
  const std::vector<std::string> ranking = ZipfRanking(kb, config.seed);
  const size_t total = static_cast<size_t>(std::llround(
      config.n_docs *
      (config.min_entities_per_doc + config.max_entities_per_doc) / 2.0));
  std::vector<double> weights(ranking.size());
  for (size_t r = 0; r < ranking.size(); ++r) {
    weights[r] = std::pow(static_cast<double>(r + 1), -config.zipf_exponent);
  }
  const double norm = std::accumulate(weights.begin(), weights.end(), 0.0);

  std::vector<size_t> counts(ranking.size());
  std::vector<std::pair<double, size_t>> remainders;
  size_t assigned = 0;
  for (size_t r = 0; r < ranking.size(); ++r) {
    const double ideal = total * weights[r] / norm;
    counts[r] = static_cast<size_t>(std::floor(ideal));
    assigned += counts[r];
    remainders.emplace_back(ideal - counts[r], r);
  }
  std::stable_sort(remainders.begin(), remainders.end(),
                   [](const auto &a, const auto &b) { return a.first > b.first; });
  for (size_t i = 0; assigned < total; ++i) {
    ++counts[remainders[i % remainders.size()].second];
    ++assigned;
  }
  std::map<std::string, size_t> plan;
  for (size_t r = 0; r < ranking.size(); ++r) plan[ranking[r]] = counts[r];
  return plan;
}

std::string ApplyTypo(const std::string &surface, double draw_word,
                      double draw_pos, bool transpose) {
  std::vector<std::string> words = SplitWords(surface);
  std::vector<size_t> eligible;
  for (size_t i = 0; i < words.size(); ++i) {
    if (utf8::Decode(words[i]).size() >= 3) eligible.push_back(i);
  }
  if (eligible.empty()) return surface;
  const size_t w = eligible[std::min(
      eligible.size() - 1, static_cast<size_t>(draw_word * eligible.size()))];
  std::u32string cps = utf8::Decode(words[w]);
  std::vector<size_t> swaps;
  for (size_t i = 0; i + 1 < cps.size(); ++i) {
    if (cps[i] != cps[i + 1]) swaps.push_back(i);
  }
  if (transpose && !swaps.empty()) {
    const size_t i = swaps[std::min(swaps.size() - 1,
                                    static_cast<size_t>(draw_pos * swaps.size()))];
    std::swap(cps[i], cps[i + 1]);
  } else {
    const size_t i =
        std::min(cps.size() - 1, static_cast<size_t>(draw_pos * cps.size()));
    cps.erase(i, 1);
  }
  words[w] = utf8::Encode(cps);
  return JoinWords(words);
}

std::string InsertFillers(const std::string &surface,
                          const std::vector<std::string> &fillers,
                          size_t gap_index) {
  std::vector<std::string> words = SplitWords(surface);
  if (words.size() < 2) return surface;
  gap_index = std::min(gap_index, words.size() - 2);
  words.insert(words.begin() + static_cast<std::ptrdiff_t>(gap_index) + 1,
               fillers.begin(), fillers.end());
  return JoinWords(words);
}

namespace {

struct RenderedMention {
  std::string entity_id;
  std::string surface;
  std::string noise;
  size_t template_id = 0;
};

struct RenderedDoc {
  std::string text;
  std::vector<RenderedMention> mentions;
  std::vector<size_t> template_ids;
};

class Generator {
 public:
  Generator(const KnowledgeBase &kb, const TemplateSet &templates,
            const GenConfig &config, const NormalizationPipeline &pipeline)
      : kb_(kb), templates_(templates), config_(config), rng_(config.seed) {
    config_.Validate();
    if (kb_.empty()) {
      throw Error(ErrorCode::kInvalidArgument, "knowledge base is empty");
    }
    if (templates_.templates.empty()) {
      throw Error(ErrorCode::kInvalidArgument, "no templates");
    }
    const std::vector<std::string> groups = kb_.Groups();
    for (const Template &t : templates_.templates) {
      for (const TemplateSlot &slot : t.slots) {
        if (slot.group != "*" &&
            !std::binary_search(groups.begin(), groups.end(), slot.group)) {
          throw Error(ErrorCode::kValidation,
                      fmt::format("template {} references unknown slot group "
                                  "\"{}\"",
                                  t.id + 1, slot.group));
        }
      }
      by_family_[t.family].push_back(&t);
    }

    std::vector<std::string> warnings;
    lexicon_ = NormalizedLexicon::Build(kb_, pipeline, config_.max_term_len,
                                        &warnings);
    // Nested synonyms would make a clean mention of one entity also match
    // another, so the labeler could never reproduce the injected labels.
    for (const auto &entry : lexicon_.entries()) {
      NormalizedDocument key_doc{"", SplitWords(entry.key)};
      for (const Match &m : FindMatches(key_doc, lexicon_)) {
        if (m.entity_id != entry.entity_id) {
          throw Error(ErrorCode::kValidation,
                      fmt::format("synonym \"{}\" of {} contains a synonym of "
                                  "{}; generation needs non-nested synonyms",
                                  entry.key, entry.entity_id, m.entity_id));
        }
      }
    }
    std::map<std::string, std::set<std::string>> keys_by_entity;
    for (const auto &entry : lexicon_.entries()) {
      keys_by_entity[entry.entity_id].insert(entry.key);
    }
    for (const Entity &e : kb_.entities()) {
      std::vector<std::string> &forms = surfaces_[e.id];
      for (const std::string &s : e.synonyms) {
        const std::string key = JoinTokens(pipeline.NormalizeTokens(s));
        if (keys_by_entity[e.id].count(key) > 0) forms.push_back(s);
      }
      if (forms.empty()) {
        throw Error(ErrorCode::kValidation,
                    fmt::format("entity {} has no synonym usable by the "
                                "lexicon",
                                e.id));
      }
      for (const std::string &u : e.unseen_forms) {
        const TokenList tokens = pipeline.NormalizeTokens(u);
        if (tokens.empty() || lexicon_.Find(tokens) != nullptr) {
          throw Error(ErrorCode::kValidation,
                      fmt::format("unseen form \"{}\" of {} is empty or in "
                                  "the lexicon",
                                  u, e.id));
        }
      }
    }
    pipeline_ = pipeline;
  }

  GoldCorpus Run() {
    const std::map<std::string, size_t> plan = FrequencyPlan(kb_, config_);
    std::vector<std::string> pool;
    for (const std::string &id : ZipfRanking(kb_, config_.seed)) {
      pool.insert(pool.end(), plan.at(id), id);
    }
    std::shuffle(pool.begin(), pool.end(), rng_);

    const size_t n = config_.n_docs;
    std::vector<size_t> per_doc(n);
    std::uniform_int_distribution<size_t> count_dist(
        config_.min_entities_per_doc, config_.max_entities_per_doc);
    size_t sum = 0;
    for (size_t &c : per_doc) {
      c = count_dist(rng_);
      sum += c;
    }
    std::uniform_int_distribution<size_t> doc_dist(0, n - 1);
    while (sum < pool.size()) {
      const size_t d = doc_dist(rng_);
      if (per_doc[d] < config_.max_entities_per_doc) {
        ++per_doc[d];
        ++sum;
      }
    }
    while (sum > pool.size()) {
      const size_t d = doc_dist(rng_);
      if (per_doc[d] > config_.min_entities_per_doc) {
        --per_doc[d];
        --sum;
      }
    }

    std::vector<size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::shuffle(order.begin(), order.end(), rng_);
    std::vector<std::string> family_of(n);
    for (size_t p = 0; p < n; ++p) {
      family_of[order[p]] =
          templates_.families[p % templates_.families.size()];
    }

    const size_t width = std::max<size_t>(6, std::to_string(n).size());
    GoldCorpus corpus;
    size_t next = 0;
    for (size_t d = 0; d < n; ++d) {
      const std::string doc_id = fmt::format("doc{:0{}d}", d + 1, width);
      std::vector<std::string> entities(pool.begin() + next,
                                        pool.begin() + next + per_doc[d]);
      next += per_doc[d];
      RenderedDoc doc = RenderChecked(doc_id, entities, family_of[d]);

      LabelSet gold{doc_id, {}};
      LabelSet clean{doc_id, {}};
      for (const RenderedMention &m : doc.mentions) {
        gold.entity_ids.insert(m.entity_id);
        if (m.noise.empty()) clean.entity_ids.insert(m.entity_id);
        corpus.mentions.push_back(MentionRecord{doc_id, m.entity_id, m.surface,
                                                !m.noise.empty(), m.noise,
                                                m.template_id});
      }
      corpus.documents.push_back(
          RawDocument{doc_id, std::move(doc.text), family_of[d]});
      corpus.gold_labels.push_back(std::move(gold));
      corpus.clean_labels.push_back(std::move(clean));
      corpus.templates_used[doc_id] = std::move(doc.template_ids);
    }
    return corpus;
  }

 private:
  static constexpr int kMaxAttempts = 100;

  double Uniform() { return std::uniform_real_distribution<double>(0, 1)(rng_); }

  size_t Pick(size_t n) {
    return std::uniform_int_distribution<size_t>(0, n - 1)(rng_);
  }

  RenderedDoc RenderChecked(const std::string &doc_id,
                            const std::vector<std::string> &entities,
                            const std::string &family) {
    for (int attempt = 0; attempt < kMaxAttempts; ++attempt) {
      RenderedDoc doc = Render(entities, family);
      std::set<std::string> clean;
      for (const RenderedMention &m : doc.mentions) {
        if (m.noise.empty()) clean.insert(m.entity_id);
      }
      const LabelSet found =
          LabelDocument(pipeline_.Normalize(doc_id, doc.text), lexicon_);
      if (found.entity_ids == clean) return doc;
    }
    throw Error(ErrorCode::kValidation,
                fmt::format("could not render {} so that the labeler finds "
                            "exactly its clean mentions; check templates and "
                            "synonyms for accidental matches",
                            doc_id));
  }

  bool Accepts(const TemplateSlot &slot, const std::string &entity_id) const {
    return slot.group == "*" || slot.group == kb_.Find(entity_id)->group;
  }

  // Slot assignment for template t with `first` placed in the first slot
  // accepting it and the remaining slots filled from `pending` in order.
  // Returns indices into pending (first is index 0), or empty on failure.
  std::vector<size_t> Assign(const Template &t,
                             const std::vector<std::string> &pending) const {
    std::vector<size_t> assignment(t.slots.size(), SIZE_MAX);
    std::vector<bool> used(pending.size(), false);
    for (size_t s = 0; s < t.slots.size(); ++s) {
      if (Accepts(t.slots[s], pending[0])) {
        assignment[s] = 0;
        used[0] = true;
        break;
      }
    }
    if (!used[0]) return {};
    for (size_t s = 0; s < t.slots.size(); ++s) {
      if (assignment[s] != SIZE_MAX) continue;
      for (size_t p = 1; p < pending.size(); ++p) {
        if (!used[p] && Accepts(t.slots[s], pending[p])) {
          assignment[s] = p;
          used[p] = true;
          break;
        }
      }
      if (assignment[s] == SIZE_MAX) return {};
    }
    return assignment;
  }

  RenderedMention Mention(const std::string &entity_id, size_t template_id) {
    const Entity &e = *kb_.Find(entity_id);
    RenderedMention m;
    m.entity_id = entity_id;
    m.template_id = template_id;
    std::vector<std::string> kinds;
    const std::vector<std::string> &forms = surfaces_.at(entity_id);
    if (Uniform() < config_.noise.unseen_form_rate && !e.unseen_forms.empty()) {
      m.surface = e.unseen_forms[Pick(e.unseen_forms.size())];
      kinds.push_back("unseen");
    } else {
      m.surface = forms[Pick(forms.size())];
    }
    if (Uniform() < config_.noise.insertion_rate) {
      const size_t n_words = SplitWords(m.surface).size();
      if (n_words >= 2) {
        std::vector<std::string> fillers;
        const size_t n_fill = 1 + Pick(2);
        for (size_t i = 0; i < n_fill; ++i) {
          fillers.push_back(config_.filler_words[Pick(config_.filler_words.size())]);
        }
        m.surface = InsertFillers(m.surface, fillers, Pick(n_words - 1));
        kinds.push_back("insertion");
      }
    }
    if (Uniform() < config_.noise.typo_rate) {
      const double draw_word = Uniform();
      const double draw_pos = Uniform();
      const bool transpose = Uniform() < 0.5;
      std::string typo = ApplyTypo(m.surface, draw_word, draw_pos, transpose);
      if (typo != m.surface) {
        m.surface = std::move(typo);
        kinds.push_back("typo");
      }
    }
    for (size_t i = 0; i < kinds.size(); ++i) {
      if (i > 0) m.noise += '+';
      m.noise += kinds[i];
    }
    return m;
  }

  RenderedDoc Render(const std::vector<std::string> &entities,
                     const std::string &family) {
    const std::vector<const Template *> &family_templates = by_family_.at(family);
    RenderedDoc doc;
    std::vector<std::string> sentences;
    std::vector<std::string> pending = entities;
    while (!pending.empty()) {
      std::vector<std::pair<const Template *, std::vector<size_t>>> options;
      for (const Template *t : family_templates) {
        if (t->slots.empty()) continue;
        std::vector<size_t> a = Assign(*t, pending);
        if (!a.empty()) options.emplace_back(t, std::move(a));
      }
      if (options.empty()) {
        throw Error(ErrorCode::kValidation,
                    fmt::format("template family \"{}\" has no template for "
                                "group \"{}\"",
                                family, kb_.Find(pending[0])->group));
      }
      const auto &[t, assignment] = options[Pick(options.size())];
      std::string sentence = t->text[0];
      for (size_t s = 0; s < t->slots.size(); ++s) {
        RenderedMention m = Mention(pending[assignment[s]], t->id);
        sentence += m.surface;
        sentence += t->text[s + 1];
        doc.mentions.push_back(std::move(m));
      }
      std::vector<std::string> rest;
      std::vector<bool> used(pending.size(), false);
      for (size_t idx : assignment) used[idx] = true;
      for (size_t p = 0; p < pending.size(); ++p) {
        if (!used[p]) rest.push_back(pending[p]);
      }
      pending = std::move(rest);
      sentences.push_back(std::move(sentence));
      doc.template_ids.push_back(t->id);
    }

    std::vector<const Template *> fillers;
    for (const Template *t : family_templates) {
      if (t->slots.empty()) fillers.push_back(t);
    }
    const bool add_filler =
        !fillers.empty() &&
        (sentences.empty() || Uniform() < config_.filler_sentence_rate);
    if (add_filler) {
      const Template *t = fillers[Pick(fillers.size())];
      const size_t at = Pick(sentences.size() + 1);
      sentences.insert(sentences.begin() + static_cast<std::ptrdiff_t>(at),
                       t->text[0]);
      doc.template_ids.insert(
          doc.template_ids.begin() + static_cast<std::ptrdiff_t>(at), t->id);
    }
    doc.text = JoinWords(sentences);
    return doc;
  }

  const KnowledgeBase &kb_;
  const TemplateSet &templates_;
  GenConfig config_;
  NormalizationPipeline pipeline_;
  NormalizedLexicon lexicon_;
  std::mt19937_64 rng_;
  std::map<std::string, std::vector<const Template *>> by_family_;
  std::map<std::string, std::vector<std::string>> surfaces_;
};

}  // namespace

GoldCorpus GenerateCorpus(const KnowledgeBase &kb, const TemplateSet &templates,
                          const GenConfig &config,
                          const NormalizationPipeline &pipeline) {
  return Generator(kb, templates, config, pipeline).Run();
}

GoldCorpus GenerateCorpus(const KnowledgeBase &kb, const GenConfig &config,
                          const NormalizationPipeline &pipeline) {
  if (config.template_file.empty()) {
    throw Error(ErrorCode::kInvalidArgument, "template_file is not set");
  }
  const TemplateSet templates = LoadTemplates(config.template_file);
  return GenerateCorpus(kb, templates, config, pipeline);
}

std::pair<GoldCorpus, GoldCorpus> SplitCorpus(const GoldCorpus &corpus,
                                              double train_fraction,
                                              uint64_t seed) {
  if (!(train_fraction > 0.0 && train_fraction < 1.0)) {
    throw Error(ErrorCode::kInvalidArgument,
                "train_fraction must be in (0, 1)");
  }
  std::set<std::string> family_set;
  for (const RawDocument &d : corpus.documents) family_set.insert(d.family);
  std::vector<std::string> families(family_set.begin(), family_set.end());
  if (families.size() < 2) {
    throw Error(ErrorCode::kInvalidArgument,
                "splitting needs at least two template families");
  }
  std::mt19937_64 rng(seed);
  std::shuffle(families.begin(), families.end(), rng);
  const size_t f = families.size();
  const size_t n_train = std::clamp<size_t>(
      static_cast<size_t>(std::llround(train_fraction * f)), 1, f - 1);
  const std::set<std::string> train_families(families.begin(),
                                             families.begin() + n_train);

  GoldCorpus train;
  GoldCorpus test;
  std::set<std::string> train_ids;
  for (size_t i = 0; i < corpus.documents.size(); ++i) {
    const RawDocument &d = corpus.documents[i];
    const bool is_train = train_families.count(d.family) > 0;
    GoldCorpus &out = is_train ? train : test;
    if (is_train) train_ids.insert(d.doc_id);
    out.documents.push_back(d);
    out.gold_labels.push_back(corpus.gold_labels[i]);
    out.clean_labels.push_back(corpus.clean_labels[i]);
    if (auto it = corpus.templates_used.find(d.doc_id);
        it != corpus.templates_used.end()) {
      out.templates_used.insert(*it);
    }
  }
  for (const MentionRecord &m : corpus.mentions) {
    (train_ids.count(m.doc_id) > 0 ? train : test).mentions.push_back(m);
  }
  return {std::move(train), std::move(test)};
}

std::string SerializeMentions(const std::vector<MentionRecord> &mentions) {
  std::string out;
  for (const MentionRecord &m : mentions) {
    json j = {{"doc_id", m.doc_id},   {"entity", m.entity_id},
              {"surface", m.surface}, {"noised", m.noised},
              {"noise", m.noise},     {"template", m.template_id}};
    out += j.dump();
    out += '\n';
  }
  return out;
}

void WriteGoldCorpus(const GoldCorpus &corpus, const std::string &dir,
                     const std::string &prefix) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) {
    throw Error(ErrorCode::kIo,
                fmt::format("cannot create {}: {}", dir, ec.message()));
  }
  const std::string base = (std::filesystem::path(dir) / prefix).string();
  WriteCorpus(base + "corpus.jsonl", corpus.documents);
  WriteLabels(base + "gold.jsonl", corpus.gold_labels);
  WriteLabels(base + "clean.jsonl", corpus.clean_labels);
  WriteFile(base + "mentions.jsonl", SerializeMentions(corpus.mentions));
}

}  // namespace medex
