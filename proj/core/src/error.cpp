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

#include "chaoscope/error.hpp"

namespace chaoscope {

std::string_view errc_name(Errc code) {
  switch (code) {
    case Errc::kSyntax: return "syntax";
    case Errc::kUndeclaredIdentifier: return "undeclared-identifier";
    case Errc::kDuplicateEquation: return "duplicate-equation";
    case Errc::kMissingEquation: return "missing-equation";
    case Errc::kDomain: return "domain";
    case Errc::kUnsupportedDialect: return "unsupported-dialect";
    case Errc::kUnmappedFunction: return "unmapped-function";
    case Errc::kValidation: return "validation";
    case Errc::kOverflow: return "overflow";
    case Errc::kDegenerate: return "degenerate";
    case Errc::kNoStatistics: return "no-statistics";
    case Errc::kIo: return "io";
    case Errc::kNotFound: return "not-found";
    case Errc::kDuplicate: return "duplicate";
    case Errc::kIntegrity: return "integrity";
    case Errc::kCompilerNotFound: return "compiler-not-found";
    case Errc::kCompileFailed: return "compile-failed";
    case Errc::kHandshakeMismatch: return "handshake-mismatch";
    case Errc::kPluginExecution: return "plugin-execution";
    case Errc::kPluginOutput: return "plugin-output";
    case Errc::kTimeout: return "timeout";
    case Errc::kCanceled: return "canceled";
    case Errc::kBind: return "bind";
  }
  return "unknown";
}

SyntaxError::SyntaxError(std::size_t line, std::size_t column,
                         const std::string& message)
    : Error(Errc::kSyntax, "syntax error at " + std::to_string(line) + ":" +
                               std::to_string(column) + ": " + message),
      line_(line),
      column_(column) {}

DomainError::DomainError(std::size_t component, const std::string& message)
    : Error(Errc::kDomain, "domain error in component " +
                               std::to_string(component) + ": " + message),
      component_(component) {}

}  // namespace chaoscope
