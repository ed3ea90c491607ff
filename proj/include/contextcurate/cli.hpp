// Copyright 2026 The ContextCurate Authors.
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

#include <iosfwd>
#include <string>
#include <vector>

namespace ctxcur {

/// Exit codes shared by every subcommand.
enum ExitCode : int { kExitOk = 0, kExitInputError = 1, kExitInternalError = 2 };

/// Entry point for the `contextcurate` tool. `args` includes the program
/// name. Subcommands: validate, score, train, cv, sweep, report.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace ctxcur
