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

#ifndef SINGSHIFT_CLI_H_
#define SINGSHIFT_CLI_H_

#include <ostream>
#include <string>
#include <vector>

#include "singshift/error.h"

namespace singshift {

// Process exit codes.
inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;     // I/O, configuration, usage
inline constexpr int kExitResolution = 2;  // unknown speaker, no voiced frames
inline constexpr int kExitNonFinite = 3;   // training halted on a NaN loss
inline constexpr int kExitAlignment = 4;   // content / f0 streams disagree

int ExitCodeFor(ErrorCode code);

// Runs one command line (args[0] is the program name). Results go to
// `out`, diagnostics to `err`.
int RunCli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace singshift

#endif  // SINGSHIFT_CLI_H_
