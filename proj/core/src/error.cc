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

#include "singshift/error.h"

namespace singshift {

const char* ErrorCodeName(ErrorCode code) {
  switch (code) {
    case ErrorCode::kFormat: return "format error";
    case ErrorCode::kUnsupported: return "unsupported";
    case ErrorCode::kIo: return "I/O error";
    case ErrorCode::kArgument: return "argument error";
    case ErrorCode::kConfig: return "config error";
    case ErrorCode::kDimension: return "dimension mismatch";
    case ErrorCode::kCorruption: return "corruption";
    case ErrorCode::kAlignment: return "alignment error";
    case ErrorCode::kRegistry: return "registry error";
    case ErrorCode::kProfile: return "profile error";
    case ErrorCode::kResolution: return "resolution error";
    case ErrorCode::kCorpus: return "corpus error";
    case ErrorCode::kStage: return "stage error";
    case ErrorCode::kState: return "state error";
    case ErrorCode::kNonFinite: return "non-finite value";
  }
  return "error";
}

}  // namespace singshift
