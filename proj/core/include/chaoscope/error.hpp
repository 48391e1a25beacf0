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
#include <stdexcept>
#include <string>
#include <string_view>

namespace chaoscope {

enum class Errc {
  kSyntax,
  kUndeclaredIdentifier,
  kDuplicateEquation,
  kMissingEquation,
  kDomain,
  kUnsupportedDialect,
  kUnmappedFunction,
  kValidation,
  kOverflow,
  kDegenerate,
  kNoStatistics,
  kIo,
  kNotFound,
  kDuplicate,
  kIntegrity,
  kCompilerNotFound,
  kCompileFailed,
  kHandshakeMismatch,
  kPluginExecution,
  kPluginOutput,
  kTimeout,
  kCanceled,
  kBind,
};

std::string_view errc_name(Errc code);

// Base error for every failure raised by the library. what() is a single
// line without the "error:" prefix; the CLI adds that.
class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

class SyntaxError : public Error {
 public:
  SyntaxError(std::size_t line, std::size_t column, const std::string& message);

  std::size_t line() const noexcept { return line_; }
  std::size_t column() const noexcept { return column_; }

 private:
  std::size_t line_;
  std::size_t column_;
};

// Raised by right-hand-side evaluation. component is the index of the
// equation (or 0 for predicates) whose expression left its domain.
class DomainError : public Error {
 public:
  DomainError(std::size_t component, const std::string& message);

  std::size_t component() const noexcept { return component_; }

 private:
  std::size_t component_;
};

}  // namespace chaoscope
