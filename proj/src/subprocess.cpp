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

#include "binmut/subprocess.hpp"

#include <fcntl.h>
#include <signal.h>
#include <sys/resource.h>
#include <sys/wait.h>
#include <unistd.h>

#ifdef __linux__
#include <sys/personality.h>
#endif

#include <cerrno>
#include <chrono>
#include <cstdlib>
#include <cstring>
#include <stdexcept>
#include <thread>

namespace binmut {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

[[noreturn]] void child_exec(const RunRequest& req, int err_fd) {
  // A fresh process group lets the parent kill the whole tree on timeout.
  ::setpgid(0, 0);

#ifdef __linux__
  // Best effort: without address randomization, wild pointers fault the
  // same way on every run.
  ::personality(ADDR_NO_RANDOMIZE);
#endif

  ::rlimit core{0, 0};
  ::setrlimit(RLIMIT_CORE, &core);
  ::rlimit fsize{256ull << 20, 256ull << 20};
  ::setrlimit(RLIMIT_FSIZE, &fsize);
  if (req.address_space_limit_bytes) {
    ::rlimit as{*req.address_space_limit_bytes, *req.address_space_limit_bytes};
    ::setrlimit(RLIMIT_AS, &as);
  }
  ::signal(SIGPIPE, SIG_DFL);

  int in_fd = ::open(
      req.stdin_file ? req.stdin_file->c_str() : "/dev/null", O_RDONLY);
  if (in_fd < 0) goto fail;
  if (::dup2(in_fd, STDIN_FILENO) < 0) goto fail;

  {
    int out_fd = ::open(req.stdout_file.c_str(),
                        O_WRONLY | O_CREAT | O_TRUNC, 0644);
    if (out_fd < 0) goto fail;
    if (::dup2(out_fd, STDOUT_FILENO) < 0) goto fail;

    int null_fd = ::open("/dev/null", O_WRONLY);
    if (null_fd < 0) goto fail;
    if (::dup2(null_fd, STDERR_FILENO) < 0) goto fail;
  }

  if (req.cwd && ::chdir(req.cwd->c_str()) != 0) goto fail;

  {
    std::vector<char*> argv;
    argv.reserve(req.argv.size() + 1);
    for (const std::string& a : req.argv) argv.push_back(const_cast<char*>(a.c_str()));
    argv.push_back(nullptr);

    // Fixed minimal environment: mutants must not see run-to-run noise.
    const char* path_env = ::getenv("PATH");
    std::string path_var = std::string("PATH=") +
                           (path_env ? path_env : "/usr/bin:/bin");
    char* envp[] = {path_var.data(), const_cast<char*>("LC_ALL=C"), nullptr};

    ::execve(req.argv[0].c_str(), argv.data(), envp);
  }

fail : {
  // Report errno through the CLOEXEC pipe so the parent can tell an exec
  // failure apart from the child's own exit codes.
  int e = errno;
  ssize_t ignored = ::write(err_fd, &e, sizeof(e));
  (void)ignored;
  ::_exit(127);
}
}

}  // namespace

RunResult run_process(const RunRequest& request) {
  if (request.argv.empty()) throw std::invalid_argument("empty argv");

  int err_pipe[2];
  if (::pipe(err_pipe) != 0) throw std::runtime_error("pipe() failed");
  ::fcntl(err_pipe[1], F_SETFD, FD_CLOEXEC);

  auto start = Clock::now();
  pid_t pid = ::fork();
  if (pid < 0) {
    ::close(err_pipe[0]);
    ::close(err_pipe[1]);
    throw std::runtime_error("fork() failed");
  }
  if (pid == 0) {
    ::close(err_pipe[0]);
    child_exec(request, err_pipe[1]);
  }
  ::close(err_pipe[1]);
  // Race-tolerant duplicate of the child's own setpgid.
  ::setpgid(pid, pid);

  RunResult result;
  int status = 0;
  bool killed_for_timeout = false;
  for (;;) {
    pid_t r = ::waitpid(pid, &status, WNOHANG);
    if (r == pid) break;
    if (r < 0 && errno != EINTR) {
      ::close(err_pipe[0]);
      throw std::runtime_error("waitpid() failed");
    }
    if (!killed_for_timeout && request.timeout_seconds > 0 &&
        seconds_since(start) >= request.timeout_seconds) {
      ::kill(-pid, SIGKILL);
      ::kill(pid, SIGKILL);
      killed_for_timeout = true;
    }
    std::this_thread::sleep_for(std::chrono::microseconds(500));
  }
  result.wall_seconds = seconds_since(start);

  int child_errno = 0;
  ssize_t n = ::read(err_pipe[0], &child_errno, sizeof(child_errno));
  ::close(err_pipe[0]);

  if (n == sizeof(child_errno)) {
    result.outcome = RunOutcome::ExecFailed;
    result.exec_errno = child_errno;
    return result;
  }
  if (killed_for_timeout) {
    result.outcome = RunOutcome::TimedOut;
    return result;
  }
  if (WIFEXITED(status)) {
    result.outcome = RunOutcome::Exited;
    result.exit_code = WEXITSTATUS(status);
  } else if (WIFSIGNALED(status)) {
    result.outcome = RunOutcome::Signaled;
    result.signal = WTERMSIG(status);
  }
  return result;
}

}  // namespace binmut
