// Copyright 2026 The qemerge Authors
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


#ifndef QEMERGE_CLI_HPP_
#define QEMERGE_CLI_HPP_

#include <ostream>
#include <string>
#include <vector>

namespace qemerge::cli {

inline constexpr const char* kVersion = "0.1.0";

enum ExitCode : int {
  kSuccess = 0,
  kParseFailure = 2,
  kValidationFailure = 3,
  kCapExceeded = 4,
};

/// Runs one command. `args` excludes the program name. Results go to `out`
/// unless --output names a file; diagnostics go to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// QEMERGE_THREADS if set and positive, else the hardware concurrency.
unsigned thread_count();

}  // namespace qemerge::cli

#endif  // QEMERGE_CLI_HPP_
