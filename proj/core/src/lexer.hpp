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

#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace chaoscope::detail {

enum class Tok {
  kNumber, kIdent, kLParen, kRParen, kComma, kPlus, kMinus, kStar, kSlash,
  kCaret, kEquals, kLess, kGreater, kLessEqual, kGreaterEqual, kSeparator,
  kEnd,
};

struct Token {
  Tok kind;
  std::string text;
  double number = 0.0;
  std::size_t line = 1;
  std::size_t column = 1;
};

// Splits source into tokens. Newlines and ';' become kSeparator; '#' comments
// run to end of line. Throws SyntaxError on unknown characters.
std::vector<Token> tokenize(std::string_view source);

std::string describe(const Token& tok);

}  // namespace chaoscope::detail
