#include "agentic/sandbox.hpp"

#include <fcntl.h>
#include <poll.h>
#include <sched.h>
#include <signal.h>
#include <sys/prctl.h>
#include <sys/resource.h>
#include <sys/syscall.h>
#include <sys/wait.h>
#include <unistd.h>

#include <cerrno>
#include <cstring>
#include <fstream>
#include <vector>

namespace agentic {

namespace {

// Landlock definitions newer than the system header.
constexpr int kSysLandlockCreateRuleset = 444;
constexpr int kSysLandlockAddRule = 445;
constexpr int kSysLandlockRestrictSelf = 446;
constexpr std::uint32_t kLandlockCreateRulesetVersion = 1u << 0;
constexpr int kLandlockRulePathBeneath = 1;

constexpr std::uint64_t kFsWriteFile = 1ull << 1;
constexpr std::uint64_t kFsRemoveDir = 1ull << 4;
constexpr std::uint64_t kFsRemoveFile = 1ull << 5;
constexpr std::uint64_t kFsMakeAll = 0x7Full << 6;  // char, dir, reg, sock, fifo, block, sym
constexpr std::uint64_t kFsRefer = 1ull << 13;
constexpr std::uint64_t kFsTruncate = 1ull << 14;
constexpr std::uint64_t kNetBindTcp = 1ull << 0;
constexpr std::uint64_t kNetConnectTcp = 1ull << 1;

struct RulesetAttr {
  std::uint64_t handled_access_fs;
  std::uint64_t handled_access_net;
};

struct __attribute__((packed)) PathBeneathAttr {
  std::uint64_t allowed_access;
  std::int32_t parent_fd;
};

enum SetupStage : int {
  kStageRedirect = 1,
  kStageChdir,
  kStageRlimit,
  kStageNetwork,
  kStageNoNewPrivs,
  kStageLandlock,
  kStageExec,
};

const char* stage_name(int stage) {
  switch (stage) {
    case kStageRedirect:
      return "redirecting standard streams";
    case kStageChdir:
      return "entering the sandbox directory";
    case kStageRlimit:
      return "setting resource limits";
    case kStageNetwork:
      return "isolating the network";
    case kStageNoNewPrivs:
      return "setting no_new_privs";
    case kStageLandlock:
      return "restricting filesystem writes";
    case kStageExec:
      return "starting the interpreter";
  }
  return "setup";
}

struct ChildFailure {
  int stage;
  int error;
};

[[noreturn]] void child_fail(int errfd, int stage) {
  ChildFailure f{stage, errno};
  [[maybe_unused]] auto n = ::write(errfd, &f, sizeof f);
  ::_exit(127);
}

// Runs in the forked child; only async-signal-safe calls from here on.
[[noreturn]] void child_main(int errfd, int in_fd, int out_fd, int err_fd, const char* workdir,
                             std::uint64_t memory_bytes, char* const* argv, char* const* envp) {
  ::setpgid(0, 0);
  if (::dup2(in_fd, 0) < 0 || ::dup2(out_fd, 1) < 0 || ::dup2(err_fd, 2) < 0) child_fail(errfd, kStageRedirect);
  if (::chdir(workdir) != 0) child_fail(errfd, kStageChdir);

  struct rlimit mem{memory_bytes, memory_bytes};
  struct rlimit core{0, 0};
  if (::setrlimit(RLIMIT_AS, &mem) != 0 || ::setrlimit(RLIMIT_CORE, &core) != 0) child_fail(errfd, kStageRlimit);

  bool net_isolated = ::unshare(CLONE_NEWNET) == 0;
  if (!net_isolated) net_isolated = ::unshare(CLONE_NEWUSER | CLONE_NEWNET) == 0;

  if (::prctl(PR_SET_NO_NEW_PRIVS, 1, 0, 0, 0) != 0) child_fail(errfd, kStageNoNewPrivs);

  const long abi = ::syscall(kSysLandlockCreateRuleset, nullptr, 0, kLandlockCreateRulesetVersion);
  if (abi < 1) child_fail(errfd, kStageLandlock);
  if (!net_isolated && abi < 4) {
    errno = ENOSYS;
    child_fail(errfd, kStageNetwork);
  }

  std::uint64_t fs_write = kFsWriteFile | kFsRemoveDir | kFsRemoveFile | kFsMakeAll;
  if (abi >= 2) fs_write |= kFsRefer;
  if (abi >= 3) fs_write |= kFsTruncate;
  RulesetAttr attr{fs_write, net_isolated ? 0 : (kNetBindTcp | kNetConnectTcp)};
  const std::size_t attr_size = abi >= 4 ? sizeof(RulesetAttr) : sizeof(std::uint64_t);
  const int ruleset = static_cast<int>(::syscall(kSysLandlockCreateRuleset, &attr, attr_size, 0));
  if (ruleset < 0) child_fail(errfd, kStageLandlock);

  const int dir_fd = ::open(".", O_PATH | O_CLOEXEC);
  if (dir_fd < 0) child_fail(errfd, kStageLandlock);
  PathBeneathAttr beneath{fs_write, dir_fd};
  if (::syscall(kSysLandlockAddRule, ruleset, kLandlockRulePathBeneath, &beneath, 0) != 0) {
    child_fail(errfd, kStageLandlock);
  }
  const int null_fd = ::open("/dev/null", O_PATH | O_CLOEXEC);
  if (null_fd >= 0) {
    PathBeneathAttr dev_null{kFsWriteFile | (abi >= 3 ? kFsTruncate : 0), null_fd};
    ::syscall(kSysLandlockAddRule, ruleset, kLandlockRulePathBeneath, &dev_null, 0);
  }
  if (::syscall(kSysLandlockRestrictSelf, ruleset, 0) != 0) child_fail(errfd, kStageLandlock);

  if (::syscall(SYS_close_range, 3u, ~0u, 4u /* CLOSE_RANGE_CLOEXEC */) != 0) {
    for (int fd = 3; fd < 1024; ++fd) {
      if (fd != errfd) ::fcntl(fd, F_SETFD, FD_CLOEXEC);
    }
  }
  ::execvpe(argv[0], argv, envp);
  child_fail(errfd, kStageExec);
}

class Pipe {
 public:
  Pipe() {
    if (::pipe2(fds_, O_CLOEXEC) != 0) throw SandboxSpawnFailure(std::string("pipe: ") + std::strerror(errno));
  }
  ~Pipe() {
    close_read();
    close_write();
  }
  Pipe(const Pipe&) = delete;
  Pipe& operator=(const Pipe&) = delete;

  int read_end() const { return fds_[0]; }
  int write_end() const { return fds_[1]; }
  void close_read() { close_fd(fds_[0]); }
  void close_write() { close_fd(fds_[1]); }

 private:
  static void close_fd(int& fd) {
    if (fd >= 0) ::close(fd);
    fd = -1;
  }
  int fds_[2]{-1, -1};
};

bool contains_any(const std::string& haystack, std::initializer_list<const char*> needles) {
  for (const char* n : needles) {
    if (haystack.find(n) != std::string::npos) return true;
  }
  return false;
}

SandboxVerdict classify(bool timed_out, int status, const std::string& err) {
  if (timed_out) return SandboxVerdict::Timeout;
  const bool memory_text = contains_any(err, {"MemoryError", "Cannot allocate memory", "bad_alloc", "out of memory"});
  const bool forbidden_text = contains_any(err, {"PermissionError", "Permission denied", "Operation not permitted",
                                                 "Read-only file system", "Network is unreachable"});
  if (WIFEXITED(status) && WEXITSTATUS(status) == 0) return SandboxVerdict::Ok;
  if (memory_text) return SandboxVerdict::MemoryExceeded;
  // SIGKILL that we did not send comes from the OOM killer.
  if (WIFSIGNALED(status) && WTERMSIG(status) == SIGKILL) return SandboxVerdict::MemoryExceeded;
  if (forbidden_text) return SandboxVerdict::Forbidden;
  return SandboxVerdict::NonzeroExit;
}

void append_capped(std::string& buffer, const char* data, std::size_t n, std::size_t cap, bool& truncated) {
  if (buffer.size() < cap) {
    const auto take = std::min(n, cap - buffer.size());
    buffer.append(data, take);
    if (take < n) truncated = true;
  } else if (n > 0) {
    truncated = true;
  }
}

std::filesystem::path make_workdir() {
  auto pattern = (std::filesystem::temp_directory_path() / "agentic-sbx-XXXXXX").string();
  std::vector<char> buf(pattern.begin(), pattern.end());
  buf.push_back('\0');
  if (::mkdtemp(buf.data()) == nullptr) throw SandboxSpawnFailure(std::string("mkdtemp: ") + std::strerror(errno));
  return std::filesystem::path(buf.data());
}

}  // namespace

std::string_view verdict_name(SandboxVerdict verdict) {
  switch (verdict) {
    case SandboxVerdict::Ok:
      return "Ok";
    case SandboxVerdict::Timeout:
      return "Timeout";
    case SandboxVerdict::MemoryExceeded:
      return "MemoryExceeded";
    case SandboxVerdict::NonzeroExit:
      return "NonzeroExit";
    case SandboxVerdict::Forbidden:
      return "Forbidden";
  }
  return "NonzeroExit";
}

SandboxOutcome execute_program(const std::string& source, const SandboxConfig& limits) {
  if (limits.interpreter_cmd.empty() || limits.interpreter_cmd.front().empty()) {
    throw SandboxSpawnFailure("interpreter_cmd is empty");
  }
  const auto workdir = make_workdir();
  struct Cleanup {
    std::filesystem::path dir;
    bool keep;
    ~Cleanup() {
      std::error_code ec;
      if (!keep) std::filesystem::remove_all(dir, ec);
    }
  } cleanup{workdir, limits.keep_sandbox};

  {
    std::ofstream out(workdir / limits.source_filename, std::ios::binary);
    out << source;
    if (!out) throw SandboxSpawnFailure("cannot write program into " + workdir.string());
  }

  // Everything the child needs is prepared before fork.
  std::vector<std::string> args = limits.interpreter_cmd;
  args.push_back(limits.source_filename);
  std::vector<std::string> env{
      "HOME=" + workdir.string(), "TMPDIR=" + workdir.string(), "PYTHONDONTWRITEBYTECODE=1",
      "PYTHONIOENCODING=utf-8", "LANG=C.UTF-8",
  };
  if (const char* path = std::getenv("PATH")) env.push_back(std::string("PATH=") + path);
  std::vector<char*> argv;
  for (auto& a : args) argv.push_back(a.data());
  argv.push_back(nullptr);
  std::vector<char*> envp;
  for (auto& e : env) envp.push_back(e.data());
  envp.push_back(nullptr);
  const std::string workdir_str = workdir.string();

  const int null_in = ::open("/dev/null", O_RDONLY | O_CLOEXEC);
  if (null_in < 0) throw SandboxSpawnFailure(std::string("/dev/null: ") + std::strerror(errno));
  Pipe out_pipe, err_pipe, status_pipe;

  const auto started = std::chrono::steady_clock::now();
  const pid_t pid = ::fork();
  if (pid < 0) {
    ::close(null_in);
    throw SandboxSpawnFailure(std::string("fork: ") + std::strerror(errno));
  }
  if (pid == 0) {
    child_main(status_pipe.write_end(), null_in, out_pipe.write_end(), err_pipe.write_end(), workdir_str.c_str(),
               limits.memory_bytes, argv.data(), envp.data());
  }
  ::setpgid(pid, pid);  // also done in the child; whichever runs first wins
  ::close(null_in);
  out_pipe.close_write();
  err_pipe.close_write();
  status_pipe.close_write();

  ChildFailure failure{};
  ssize_t got;
  do {
    got = ::read(status_pipe.read_end(), &failure, sizeof failure);
  } while (got < 0 && errno == EINTR);
  if (got == static_cast<ssize_t>(sizeof failure)) {
    int status = 0;
    ::waitpid(pid, &status, 0);
    throw SandboxSpawnFailure(std::string("sandbox setup failed while ") + stage_name(failure.stage) + ": " +
                              std::strerror(failure.error));
  }

  SandboxOutcome outcome;
  outcome.workdir = workdir;
  bool err_truncated = false;
  bool timed_out = false;
  bool reaped = false;
  int status = 0;
  const auto deadline = started + limits.wall_time;
  std::chrono::steady_clock::time_point drain_deadline{};
  pollfd fds[2] = {{out_pipe.read_end(), POLLIN, 0}, {err_pipe.read_end(), POLLIN, 0}};
  char buf[8192];

  while (fds[0].fd >= 0 || fds[1].fd >= 0) {
    const auto now = std::chrono::steady_clock::now();
    if (!reaped && now >= deadline) {
      ::kill(-pid, SIGKILL);
      timed_out = true;
      break;
    }
    if (reaped && now >= drain_deadline) break;
    if (!reaped) {
      if (::waitpid(pid, &status, WNOHANG) == pid) {
        reaped = true;
        // Descendants may still hold the pipes open; give them a moment.
        ::kill(-pid, SIGKILL);
        drain_deadline = now + Millis(200);
      }
    }
    const auto until = reaped ? drain_deadline : deadline;
    auto wait_ms = std::chrono::duration_cast<Millis>(until - now).count();
    wait_ms = std::clamp<long long>(wait_ms, 1, 50);
    const int ready = ::poll(fds, 2, static_cast<int>(wait_ms));
    if (ready < 0 && errno != EINTR) break;
    for (int i = 0; i < 2; ++i) {
      if (fds[i].fd < 0 || (fds[i].revents & (POLLIN | POLLHUP | POLLERR)) == 0) continue;
      const auto n = ::read(fds[i].fd, buf, sizeof buf);
      if (n > 0) {
        if (i == 0) {
          append_capped(outcome.stdout_text, buf, static_cast<std::size_t>(n), limits.stdout_byte_cap,
                        outcome.stdout_truncated);
        } else {
          append_capped(outcome.stderr_text, buf, static_cast<std::size_t>(n), limits.stdout_byte_cap, err_truncated);
        }
      } else if (n == 0 || (n < 0 && errno != EINTR && errno != EAGAIN)) {
        fds[i].fd = -1;
      }
    }
  }
  // Streams closed; the child may still be running.
  while (!reaped && !timed_out) {
    if (::waitpid(pid, &status, WNOHANG) == pid) {
      reaped = true;
    } else if (std::chrono::steady_clock::now() >= deadline) {
      timed_out = true;
    } else {
      ::usleep(2000);
    }
  }
  ::kill(-pid, SIGKILL);
  if (!reaped) ::waitpid(pid, &status, 0);
  outcome.wall_time = std::chrono::duration_cast<Millis>(std::chrono::steady_clock::now() - started);

  if (WIFEXITED(status)) {
    outcome.exit_status = WEXITSTATUS(status);
  } else if (WIFSIGNALED(status)) {
    outcome.exit_status = 128 + WTERMSIG(status);
  }
  outcome.verdict = classify(timed_out, status, outcome.stderr_text);
  return outcome;
}

}  // namespace agentic
