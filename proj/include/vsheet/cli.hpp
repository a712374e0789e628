/*
 * Copyright 2026 The vsheet Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace vsheet {

/// Process exit codes of the command-line runner.
enum ExitCode : int {
    exit_success = 0,
    exit_config_error = 2,
    exit_numerical_abort = 3,
    exit_hypothesis_violation = 4,
};

/// Runs one subcommand. args[0] is the program name. Messages go to `out`
/// and `err`; output files go to the --out directory.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace vsheet
