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

#ifndef MEDEX_COMMON_IO_HPP_
#define MEDEX_COMMON_IO_HPP_

#include <cstdint>
#include <functional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace medex {

std::string ReadFile(const std::string &path);
void WriteFile(const std::string &path, std::string_view content);

// Calls fn(line, line_number) for every line of a text file. Line numbers
// start at 1. Trailing '\r' is removed.
void ForEachLine(const std::string &path,
                 const std::function<void(std::string_view, size_t)> &fn);

// Reads a two-column TSV table. Lines starting with '#' and blank lines are
// skipped. The key is everything before the first tab, the value everything
// after it.
std::vector<std::pair<std::string, std::string>> ReadTsvPairs(
    const std::string &path);

uint32_t Crc32(std::string_view bytes);
std::string Sha256Hex(std::string_view bytes);
std::string FileSha256(const std::string &path);

}  // namespace medex

#endif  // MEDEX_COMMON_IO_HPP_
