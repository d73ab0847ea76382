#pragma once

#include <filesystem>
#include <stdexcept>
#include <string>

#include "agentic/core_types.hpp"

namespace agentic {

enum class SandboxVerdict { Ok, Timeout, MemoryExceeded, NonzeroExit, Forbidden };

std::string_view verdict_name(SandboxVerdict verdict);

struct SandboxOutcome {
  std::string stdout_text;
  std::string stderr_text;
  int exit_status = 0;  // 128 + signal number when killed by a signal
  Millis wall_time{0};
  SandboxVerdict verdict = SandboxVerdict::Ok;
  bool stdout_truncated = false;
  std::filesystem::path workdir;  // only meaningful with keep_sandbox
};

/// The sandbox itself could not be set up (temp dir, fork, isolation, exec).
class SandboxSpawnFailure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Runs `interpreter_cmd <source_filename>` in a fresh temp dir.
///
/// Enforcement on Linux:
///   - wall time: parent-side deadline, then SIGKILL to the process group
///   - memory: RLIMIT_AS
///   - network: a private network namespace (plain, or inside a user
///     namespace when unprivileged); Landlock TCP rules as a last resort
///   - filesystem writes: Landlock, allowed only beneath the temp dir
/// If no network or write isolation can be established the run fails with
/// SandboxSpawnFailure rather than executing unconfined.
SandboxOutcome execute_program(const std::string& source, const SandboxConfig& limits);

class CodeExecutor {
 public:
  virtual ~CodeExecutor() = default;
  virtual SandboxOutcome execute(const std::string& source, const SandboxConfig& limits) = 0;
};

class ProcessSandbox final : public CodeExecutor {
 public:
  SandboxOutcome execute(const std::string& source, const SandboxConfig& limits) override {
    return execute_program(source, limits);
  }
};

}  // namespace agentic
