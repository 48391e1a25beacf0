// Copyright 2026 The Chaoscope Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "lexer.hpp"

#include <cctype>
#include <charconv>

#include "chaoscope/error.hpp"

namespace chaoscope::detail {

namespace {

bool ident_start(char c) {
  return std::isalpha(static_cast<unsigned char>(c)) || c == '_';
}
bool ident_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '_';
}

}  // namespace

std::vector<Token> tokenize(std::string_view src) {
  std::vector<Token> out;
  std::size_t line = 1;
  std::size_t col = 1;
  std::size_t i = 0;

  auto push = [&](Tok kind, std::size_t len) {
    out.push_back(Token{kind, std::string(src.substr(i, len)), 0.0, line, col});
    i += len;
    col += len;
  };

  while (i < src.size()) {
    const char c = src[i];
    if (c == '\n') {
      out.push_back(Token{Tok::kSeparator, "\\n", 0.0, line, col});
      ++i;
      ++line;
      col = 1;
      continue;
    }
    if (c == ' ' || c == '\t' || c == '\r') {
      ++i;
      ++col;
      continue;
    }
    if (c == '#') {
      while (i < src.size() && src[i] != '\n') ++i;
      continue;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) ||
        (c == '.' && i + 1 < src.size() &&
         std::isdigit(static_cast<unsigned char>(src[i + 1])))) {
      std::size_t j = i;
      while (j < src.size() && std::isdigit(static_cast<unsigned char>(src[j]))) ++j;
      if (j < src.size() && src[j] == '.') {
        ++j;
        while (j < src.size() && std::isdigit(static_cast<unsigned char>(src[j]))) ++j;
      }
      if (j < src.size() && (src[j] == 'e' || src[j] == 'E')) {
        std::size_t k = j + 1;
        if (k < src.size() && (src[k] == '+' || src[k] == '-')) ++k;
        if (k < src.size() && std::isdigit(static_cast<unsigned char>(src[k]))) {
          while (k < src.size() && std::isdigit(static_cast<unsigned char>(src[k]))) ++k;
          j = k;
        }
      }
      double value = 0.0;
      auto [ptr, ec] = std::from_chars(src.data() + i, src.data() + j, value);
      if (ec != std::errc() || ptr != src.data() + j) {
        throw SyntaxError(line, col, "malformed number '" +
                                         std::string(src.substr(i, j - i)) + "'");
      }
      Token tok{Tok::kNumber, std::string(src.substr(i, j - i)), value, line, col};
      out.push_back(std::move(tok));
      col += j - i;
      i = j;
      continue;
    }
    if (ident_start(c)) {
      std::size_t j = i;
      while (j < src.size() && ident_char(src[j])) ++j;
      push(Tok::kIdent, j - i);
      continue;
    }
    const char next = i + 1 < src.size() ? src[i + 1] : '\0';
    switch (c) {
      case '(': push(Tok::kLParen, 1); break;
      case ')': push(Tok::kRParen, 1); break;
      case ',': push(Tok::kComma, 1); break;
      case '+': push(Tok::kPlus, 1); break;
      case '-': push(Tok::kMinus, 1); break;
      case '*': push(Tok::kStar, 1); break;
      case '/': push(Tok::kSlash, 1); break;
      case '^': push(Tok::kCaret, 1); break;
      case '=': push(Tok::kEquals, 1); break;
      case ';': push(Tok::kSeparator, 1); break;
      case '<':
        if (next == '=') push(Tok::kLessEqual, 2); else push(Tok::kLess, 1);
        break;
      case '>':
        if (next == '=') push(Tok::kGreaterEqual, 2); else push(Tok::kGreater, 1);
        break;
      default:
        throw SyntaxError(line, col, std::string("unexpected character '") + c + "'");
    }
  }
  out.push_back(Token{Tok::kEnd, "", 0.0, line, col});
  return out;
}

std::string describe(const Token& tok) {
  switch (tok.kind) {
    case Tok::kEnd: return "end of input";
    case Tok::kSeparator: return "end of statement";
    default: return "'" + tok.text + "'";
  }
}

}  // namespace chaoscope::detail
