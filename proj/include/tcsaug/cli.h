// Copyright 2026 The tcsaug Authors.
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

#ifndef TCSAUG_CLI_H_
#define TCSAUG_CLI_H_

#include <ostream>
#include <string>
#include <vector>

#include "tcsaug/error.h"

namespace tcsaug {

// Process exit codes.
inline constexpr int kExitOk = 0;
inline constexpr int kExitInternal = 1;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitInput = 3;
inline constexpr int kExitService = 4;
inline constexpr int kExitTransport = 5;

int ExitCodeFor(ErrorCode code);

// Runs the `tcsaug` command line. `args` excludes the program name. Results
// go to `out`; JSON-lines logs and error records go to `err`.
int RunCli(const std::vector<std::string>& args, std::ostream& out,
           std::ostream& err);

}  // namespace tcsaug

#endif  // TCSAUG_CLI_H_
