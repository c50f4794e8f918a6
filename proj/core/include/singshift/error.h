// Copyright (c) 2026 The singshift Authors
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

#ifndef SINGSHIFT_ERROR_H_
#define SINGSHIFT_ERROR_H_

#include <stdexcept>
#include <string>

namespace singshift {

enum class ErrorCode {
  kFormat,       // malformed file header or syntax
  kUnsupported,  // well-formed but unsupported encoding
  kIo,
  kArgument,
  kConfig,
  kDimension,
  kCorruption,   // truncated or inconsistent payload
  kAlignment,
  kRegistry,     // unknown or duplicate speaker
  kProfile,      // no voiced frames to build a pitch profile
  kResolution,   // no profile and no fallback for a target
  kCorpus,
  kStage,        // training stage ordering violated
  kState,        // component used before it was loaded
  kNonFinite,
};

const char* ErrorCodeName(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(ErrorCodeName(code)) + ": " + what),
        code_(code) {}

  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace singshift

#endif  // SINGSHIFT_ERROR_H_
