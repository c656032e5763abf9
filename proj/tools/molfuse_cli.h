// Copyright 2026 The Molfuse Authors.
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

// Command-line front end: prepare, train-mol, train-text, predict, eval and
// significance subcommands.

#ifndef MOLFUSE_TOOLS_MOLFUSE_CLI_H_
#define MOLFUSE_TOOLS_MOLFUSE_CLI_H_

#include <ostream>
#include <string>
#include <vector>

namespace molfuse {
namespace cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;
inline constexpr int kExitDataError = 2;
inline constexpr int kExitConfigError = 3;

// Runs one invocation. args excludes the program name. Reports go to out,
// warnings and errors to err.
int RunCli(const std::vector<std::string>& args, std::ostream& out,
           std::ostream& err);

}  // namespace cli
}  // namespace molfuse

#endif  // MOLFUSE_TOOLS_MOLFUSE_CLI_H_
