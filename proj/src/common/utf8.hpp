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

// Minimal UTF-8 helpers. Invalid byte sequences decode to U+FFFD so that all
// text processing stays total.

#ifndef MEDEX_COMMON_UTF8_HPP_
#define MEDEX_COMMON_UTF8_HPP_

#include <string>
#include <string_view>
#include <vector>

namespace medex::utf8 {

std::u32string Decode(std::string_view text);
std::string Encode(std::u32string_view text);
void Append(char32_t cp, std::string *out);

// Simple case folding for ASCII, Latin-1, Latin Extended-A, Greek and
// Cyrillic. Other code points are returned unchanged.
char32_t ToLower(char32_t cp);
std::string ToLower(std::string_view text);

bool IsSpace(char32_t cp);
bool IsPunct(char32_t cp);

}  // namespace medex::utf8

#endif  // MEDEX_COMMON_UTF8_HPP_
