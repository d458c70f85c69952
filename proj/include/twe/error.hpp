// Copyright 2026 The TWE Authors.
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

#pragma once

#include <functional>
#include <iostream>
#include <stdexcept>
#include <string>
#include <string_view>

namespace twe {

enum class ErrorCode {
  kEmptyInput,
  kDimensionMismatch,
  kDuplicateToken,
  kNonFiniteValue,
  kIo,
  kParse,
  kNoOverlap,
  kDegenerateSource,
  kTooFewPairs,
  kOovQuery,
  kInvalidPersistence,
  kEmptyList,
  kEmptyCorpus,
  kNoRepresentableTokens,
  kEmptySentence,
  kEmptyVocabulary,
  kNonFiniteLoss,
  kZeroVector,
  kRaggedRatings,
  kZeroVariance,
  kLengthMismatch,
  kAllTied,
  kSingleClass,
  kUnresolvedId,
  kInvalidArgument,
};

inline const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::kEmptyInput: return "EmptyInput";
    case ErrorCode::kDimensionMismatch: return "DimensionMismatch";
    case ErrorCode::kDuplicateToken: return "DuplicateToken";
    case ErrorCode::kNonFiniteValue: return "NonFiniteValue";
    case ErrorCode::kIo: return "IoError";
    case ErrorCode::kParse: return "ParseError";
    case ErrorCode::kNoOverlap: return "NoOverlap";
    case ErrorCode::kDegenerateSource: return "DegenerateSource";
    case ErrorCode::kTooFewPairs: return "TooFewPairs";
    case ErrorCode::kOovQuery: return "OOVQuery";
    case ErrorCode::kInvalidPersistence: return "InvalidPersistence";
    case ErrorCode::kEmptyList: return "EmptyList";
    case ErrorCode::kEmptyCorpus: return "EmptyCorpus";
    case ErrorCode::kNoRepresentableTokens: return "NoRepresentableTokens";
    case ErrorCode::kEmptySentence: return "EmptySentence";
    case ErrorCode::kEmptyVocabulary: return "EmptyVocabulary";
    case ErrorCode::kNonFiniteLoss: return "NonFiniteLoss";
    case ErrorCode::kZeroVector: return "ZeroVector";
    case ErrorCode::kRaggedRatings: return "RaggedRatings";
    case ErrorCode::kZeroVariance: return "ZeroVariance";
    case ErrorCode::kLengthMismatch: return "LengthMismatch";
    case ErrorCode::kAllTied: return "AllTied";
    case ErrorCode::kSingleClass: return "SingleClass";
    case ErrorCode::kUnresolvedId: return "UnresolvedId";
    case ErrorCode::kInvalidArgument: return "InvalidArgument";
  }
  return "Unknown";
}

/// Every failure raised by the library. `what()` is prefixed with the
/// error name so one-line diagnostics are self-describing.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(to_string(code)) + ": " + message),
        code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& message) {
  throw Error(code, message);
}

// Non-fatal conditions (e.g. an underdetermined alignment fit) are routed
// here. Default sink writes to stderr; tests swap it out.
using WarningSink = std::function<void(std::string_view)>;

inline WarningSink& warning_sink() {
  static WarningSink sink = [](std::string_view msg) {
    std::cerr << "warning: " << msg << '\n';
  };
  return sink;
}

inline void warn(std::string_view msg) {
  if (warning_sink()) warning_sink()(msg);
}

}  // namespace twe
