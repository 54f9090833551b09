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

#ifndef MEDEX_TESTS_FIXTURES_HPP_
#define MEDEX_TESTS_FIXTURES_HPP_

#include <fmt/format.h>

#include <string>
#include <vector>

#include "kb/kb.hpp"
#include "synthgen/synthgen.hpp"

namespace medex::testing {

// Small KB with non-nested synonyms.
inline KnowledgeBase ToyKb() {
  return KnowledgeBase::FromEntities({
      Entity{"C01", "pain in the heart region", "Sign or Symptom",
             {"pain in the heart region", "cardiac ache"},
             {"pressure in the chest"}},
      Entity{"C02", "headache", "Sign or Symptom", {"headache", "cephalgia"},
             {"head is splitting"}},
      Entity{"C03", "intercostal neuralgia", "Disease or Syndrome",
             {"intercostal neuralgia"}, {}},
      Entity{"C04", "urinary incontinence", "Sign or Symptom",
             {"urinary incontinence", "enuresis"},
             {"leakage of urine into the diaper"}},
      Entity{"C05", "complete blood count", "Laboratory Procedure",
             {"complete blood count", "full blood count"}, {}},
      Entity{"C06", "rhinorrhea", "Sign or Symptom", {"rhinorrhea", "runny nose"}, {}},
      Entity{"C07", "nasal congestion", "Sign or Symptom",
             {"nasal congestion", "stuffy nose"}, {}},
      Entity{"C08", "ultrasonography", "Diagnostic Procedure",
             {"ultrasonography", "sonogram"}, {}},
      Entity{"C09", "urinalysis", "Laboratory Procedure", {"urinalysis"}, {}},
      Entity{"C10", "amoxicillin", "Pharmacologic Substance",
             {"amoxicillin", "amoxil"}, {}},
      Entity{"C11", "frailty", "Sign or Symptom", {"frailty", "weakness"}, {}},
      Entity{"C12", "coughing", "Sign or Symptom", {"coughing", "tussis"}, {}},
  });
}

inline std::string ToyTemplates(size_t n_families) {
  std::string out = "# synthetic templates\n";
  for (size_t f = 0; f < n_families; ++f) {
    out += fmt::format("# family: f{}\n", f);
    out += fmt::format("visit {} patient reports {{entity:*}} today.\n", f);
    out += fmt::format("noted at visit {} {{entity:*}} and also {{entity:*}}.\n", f);
    out += fmt::format("no other complaints at visit {}.\n", f);
  }
  return out;
}

inline GenConfig ToyConfig(size_t n_docs) {
  GenConfig config;
  config.seed = 42;
  config.n_docs = n_docs;
  config.min_entities_per_doc = 1;
  config.max_entities_per_doc = 3;
  config.zipf_exponent = 1.0;
  return config;
}

}  // namespace medex::testing

#endif  // MEDEX_TESTS_FIXTURES_HPP_
