// Copyright 2026 The binmut Authors
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

#ifndef BINMUT_SUBPROCESS_HPP
#define BINMUT_SUBPROCESS_HPP

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace binmut {

struct RunRequest {
  std::vector<std::string> argv;  // argv[0] is the executable path
  std::optional<std::filesystem::path> stdin_file;  // /dev/null when absent
  std::filesystem::path stdout_file;                // captured output
  std::optional<std::filesystem::path> cwd;
  double timeout_seconds = 0;  // 0 disables the timeout
  std::optional<uint64_t> address_space_limit_bytes;
};

enum class RunOutcome {
  Exited,      // normal termination, exit_code valid
  Signaled,    // killed by a signal, signal valid
  TimedOut,    // exceeded timeout_seconds, process group killed
  ExecFailed,  // the executable could not be started
};

struct RunResult {
  RunOutcome outcome = RunOutcome::ExecFailed;
  int exit_code = -1;
  int signal = 0;
  double wall_seconds = 0;
  int exec_errno = 0;  // set for ExecFailed
};

// Runs one child to completion (or timeout) with a minimal, fixed
// environment. The child gets its own process group so a timeout kill
// also reaps anything it spawned. Address-space randomization is turned
// off where the platform allows, keeping crashy behaviour reproducible.
RunResult run_process(const RunRequest& request);

}  // namespace binmut

#endif  // BINMUT_SUBPROCESS_HPP
