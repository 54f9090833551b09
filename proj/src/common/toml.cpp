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

#include "common/toml.hpp"

#include <cerrno>
#include <cstdlib>
#include <limits>

#include <fmt/format.h>

#include "common/error.hpp"
#include "common/io.hpp"
#include "common/utf8.hpp"

namespace medex::toml {

const char *Value::KindName() const {
  switch (kind) {
    case Kind::kBool: return "boolean";
    case Kind::kInt: return "integer";
    case Kind::kFloat: return "float";
    case Kind::kString: return "string";
    case Kind::kArray: return "array";
  }
  return "?";
}

namespace {

class Parser {
 public:
  Parser(std::string_view text, const std::string &source)
      : text_(text), source_(source) {}

  Document Run() {
    Document doc;
    doc[""];
    std::string table;
    while (true) {
      SkipBlankAndComments();
      if (AtEnd()) break;
      if (Peek() == '[') {
        ++pos_;
        if (!AtEnd() && Peek() == '[') Fail("arrays of tables are not supported");
        SkipInline();
        table = ParseKey();
        SkipInline();
        while (!AtEnd() && Peek() == '.') {
          ++pos_;
          SkipInline();
          table += "." + ParseKey();
          SkipInline();
        }
        Expect(']');
        if (doc.count(table) > 0 && !(table.empty())) {
          Fail(fmt::format("table [{}] defined twice", table));
        }
        doc[table];
        EndOfLine();
        continue;
      }
      const size_t key_line = line_;
      std::string key = ParseKey();
      SkipInline();
      if (!AtEnd() && Peek() == '.') Fail("dotted keys are not supported");
      Expect('=');
      SkipInline();
      Value v = ParseValue();
      v.line = key_line;
      if (!doc[table].emplace(key, std::move(v)).second) {
        Fail(fmt::format("duplicate key \"{}\"", key));
      }
      EndOfLine();
    }
    return doc;
  }

 private:
  [[noreturn]] void Fail(const std::string &what) const {
    throw Error(ErrorCode::kParse,
                fmt::format("{}:{}: {}", source_, line_, what));
  }

  bool AtEnd() const { return pos_ >= text_.size(); }
  char Peek() const { return text_[pos_]; }

  void Expect(char c) {
    if (AtEnd() || Peek() != c) Fail(fmt::format("expected '{}'", c));
    ++pos_;
  }

  void SkipInline() {
    while (!AtEnd() && (Peek() == ' ' || Peek() == '\t')) ++pos_;
  }

  void SkipComment() {
    if (!AtEnd() && Peek() == '#') {
      while (!AtEnd() && Peek() != '\n') ++pos_;
    }
  }

  void SkipBlankAndComments() {
    while (!AtEnd()) {
      const char c = Peek();
      if (c == ' ' || c == '\t' || c == '\r') {
        ++pos_;
      } else if (c == '\n') {
        ++pos_;
        ++line_;
      } else if (c == '#') {
        SkipComment();
      } else {
        break;
      }
    }
  }

  void EndOfLine() {
    SkipInline();
    SkipComment();
    if (!AtEnd() && Peek() == '\r') ++pos_;
    if (AtEnd()) return;
    if (Peek() != '\n') Fail("unexpected trailing characters");
    ++pos_;
    ++line_;
  }

  static bool IsBareKeyChar(char c) {
    return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') ||
           (c >= '0' && c <= '9') || c == '_' || c == '-';
  }

  std::string ParseKey() {
    if (AtEnd()) Fail("expected a key");
    if (Peek() == '"') return ParseBasicString();
    if (Peek() == '\'') return ParseLiteralString();
    const size_t start = pos_;
    while (!AtEnd() && IsBareKeyChar(Peek())) ++pos_;
    if (pos_ == start) Fail("expected a key");
    return std::string(text_.substr(start, pos_ - start));
  }

  std::string ParseBasicString() {
    Expect('"');
    std::string out;
    while (true) {
      if (AtEnd() || Peek() == '\n') Fail("unterminated string");
      const char c = text_[pos_++];
      if (c == '"') break;
      if (c != '\\') {
        out += c;
        continue;
      }
      if (AtEnd()) Fail("unterminated escape");
      const char e = text_[pos_++];
      switch (e) {
        case '"': out += '"'; break;
        case '\\': out += '\\'; break;
        case 'n': out += '\n'; break;
        case 't': out += '\t'; break;
        case 'r': out += '\r'; break;
        case 'b': out += '\b'; break;
        case 'f': out += '\f'; break;
        case 'u':
        case 'U': {
          const size_t digits = e == 'u' ? 4 : 8;
          if (pos_ + digits > text_.size()) Fail("bad unicode escape");
          const std::string hex(text_.substr(pos_, digits));
          pos_ += digits;
          char *end = nullptr;
          const unsigned long cp = std::strtoul(hex.c_str(), &end, 16);
          if (end != hex.c_str() + digits) Fail("bad unicode escape");
          utf8::Append(static_cast<char32_t>(cp), &out);
          break;
        }
        default:
          Fail(fmt::format("unknown escape \\{}", e));
      }
    }
    return out;
  }

  std::string ParseLiteralString() {
    Expect('\'');
    const size_t start = pos_;
    while (!AtEnd() && Peek() != '\'' && Peek() != '\n') ++pos_;
    if (AtEnd() || Peek() != '\'') Fail("unterminated string");
    std::string out(text_.substr(start, pos_ - start));
    ++pos_;
    return out;
  }

  Value ParseValue() {
    if (AtEnd()) Fail("expected a value");
    Value v;
    const char c = Peek();
    if (c == '"') {
      if (text_.substr(pos_, 3) == "\"\"\"") Fail("multi-line strings are not supported");
      v.kind = Value::Kind::kString;
      v.s = ParseBasicString();
      return v;
    }
    if (c == '\'') {
      v.kind = Value::Kind::kString;
      v.s = ParseLiteralString();
      return v;
    }
    if (c == '[') return ParseArray();
    if (c == '{') Fail("inline tables are not supported");
    const size_t start = pos_;
    while (!AtEnd() && Peek() != ',' && Peek() != ']' && Peek() != '#' &&
           Peek() != '\n' && Peek() != ' ' && Peek() != '\t' &&
           Peek() != '\r') {
      ++pos_;
    }
    std::string word(text_.substr(start, pos_ - start));
    if (word == "true" || word == "false") {
      v.kind = Value::Kind::kBool;
      v.b = word == "true";
      return v;
    }
    std::string digits;
    for (char ch : word) {
      if (ch != '_') digits += ch;
    }
    if (digits.empty()) Fail("expected a value");
    const bool is_float =
        digits.find_first_of(".eE") != std::string::npos ||
        digits.find("inf") != std::string::npos ||
        digits.find("nan") != std::string::npos;
    errno = 0;
    char *end = nullptr;
    if (is_float) {
      v.kind = Value::Kind::kFloat;
      std::string s = digits;
      if (s == "inf" || s == "+inf") {
        v.f = std::numeric_limits<double>::infinity();
        return v;
      }
      if (s == "-inf") {
        v.f = -std::numeric_limits<double>::infinity();
        return v;
      }
      if (s == "nan" || s == "+nan" || s == "-nan") {
        v.f = std::numeric_limits<double>::quiet_NaN();
        return v;
      }
      v.f = std::strtod(s.c_str(), &end);
    } else {
      v.kind = Value::Kind::kInt;
      v.i = std::strtoll(digits.c_str(), &end, 10);
    }
    if (end == nullptr || *end != '\0' || errno == ERANGE) {
      Fail(fmt::format("bad value \"{}\"", word));
    }
    return v;
  }

  Value ParseArray() {
    Expect('[');
    Value v;
    v.kind = Value::Kind::kArray;
    while (true) {
      SkipBlankAndComments();
      if (AtEnd()) Fail("unterminated array");
      if (Peek() == ']') {
        ++pos_;
        break;
      }
      v.array.push_back(ParseValue());
      SkipBlankAndComments();
      if (AtEnd()) Fail("unterminated array");
      if (Peek() == ',') {
        ++pos_;
        continue;
      }
      if (Peek() != ']') Fail("expected ',' or ']' in array");
    }
    return v;
  }

  std::string_view text_;
  std::string source_;
  size_t pos_ = 0;
  size_t line_ = 1;
};

}  // namespace

Document Parse(std::string_view text, const std::string &source) {
  return Parser(text, source).Run();
}

Document ParseFile(const std::string &path) { return Parse(ReadFile(path), path); }

}  // namespace medex::toml
