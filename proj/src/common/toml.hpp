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

// Reader for the TOML subset used by run configs: [table] headers, bare or
// quoted keys, basic and literal strings, integers, floats, booleans and
// (possibly multi-line) arrays. Inline tables, dates and multi-line strings
// are rejected.

#ifndef MEDEX_COMMON_TOML_HPP_
#define MEDEX_COMMON_TOML_HPP_

#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace medex::toml {

struct Value {
  enum class Kind { kBool, kInt, kFloat, kString, kArray };

  Kind kind = Kind::kInt;
  bool b = false;
  int64_t i = 0;
  double f = 0.0;
  std::string s;
  std::vector<Value> array;
  size_t line = 0;

  const char *KindName() const;
};

// Keys of one table, in sorted order.
using Table = std::map<std::string, Value>;

// Table name ("" for top-level keys) -> table.
using Document = std::map<std::string, Table>;

Document Parse(std::string_view text, const std::string &source);
Document ParseFile(const std::string &path);

}  // namespace medex::toml

#endif  // MEDEX_COMMON_TOML_HPP_
