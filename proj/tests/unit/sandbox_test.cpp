#include <gtest/gtest.h>

#include <chrono>
#include <cstdlib>

#include "agentic/sandbox.hpp"
#include "agentic/text_util.hpp"
#include "test_support.hpp"

namespace agentic {
namespace {

SandboxConfig limits(Millis wall = Millis{5000}) {
  SandboxConfig c;
  c.wall_time = wall;
  return c;
}

TEST(Sandbox, PrintsThree) {
  const auto out = execute_program("print(3)\n", limits());
  EXPECT_EQ(out.verdict, SandboxVerdict::Ok);
  EXPECT_EQ(text::trim(out.stdout_text), "3");
  EXPECT_EQ(out.exit_status, 0);
}

TEST(Sandbox, InfiniteLoopTimesOut) {
  const auto start = std::chrono::steady_clock::now();
  const auto out = execute_program("while True:\n    pass\n", limits(Millis{2000}));
  const auto elapsed = std::chrono::steady_clock::now() - start;
  EXPECT_EQ(out.verdict, SandboxVerdict::Timeout);
  EXPECT_LE(elapsed, std::chrono::milliseconds(2500));
  EXPECT_GE(elapsed, std::chrono::milliseconds(1900));
}

TEST(Sandbox, ChildProcessesAreKilledToo) {
  const auto out = execute_program(
      "import subprocess, time\nsubprocess.Popen(['sleep', '30'])\ntime.sleep(30)\n", limits(Millis{1000}));
  EXPECT_EQ(out.verdict, SandboxVerdict::Timeout);
  EXPECT_LE(out.wall_time, Millis{1500});
}

TEST(Sandbox, NonzeroExitCapturesStderr) {
  const auto out = execute_program("import sys\nsys.stderr.write('boom\\n')\nsys.exit(1)\n", limits());
  EXPECT_EQ(out.verdict, SandboxVerdict::NonzeroExit);
  EXPECT_EQ(out.exit_status, 1);
  EXPECT_NE(out.stderr_text.find("boom"), std::string::npos);
}

TEST(Sandbox, MemoryCap) {
  auto c = limits();
  c.memory_bytes = 256ull << 20;
  const auto out = execute_program("x = bytearray(1024 * 1024 * 1024)\nprint(len(x))\n", c);
  EXPECT_EQ(out.verdict, SandboxVerdict::MemoryExceeded);
}

TEST(Sandbox, WritesOutsideWorkdirAreDenied) {
  testing::TempDir outside;
  const auto target = (outside / "escape.txt").string();
  const auto out = execute_program("open('" + target + "', 'w').write('x')\n", limits());
  EXPECT_EQ(out.verdict, SandboxVerdict::Forbidden);
  EXPECT_FALSE(std::filesystem::exists(target));
}

TEST(Sandbox, RelativePathEscapeIsDenied) {
  const auto out = execute_program("open('../agentic-escape-probe.txt', 'w').write('x')\n", limits());
  EXPECT_EQ(out.verdict, SandboxVerdict::Forbidden);
  EXPECT_FALSE(std::filesystem::exists(std::filesystem::temp_directory_path() / "agentic-escape-probe.txt"));
}

TEST(Sandbox, WritesInsideWorkdirAreAllowed) {
  const auto out = execute_program("open('out.txt', 'w').write('x')\nprint(open('out.txt').read())\n", limits());
  EXPECT_EQ(out.verdict, SandboxVerdict::Ok);
  EXPECT_EQ(text::trim(out.stdout_text), "x");
}

TEST(Sandbox, NetworkIsUnavailable) {
  const auto out = execute_program(
      "import socket\ns = socket.create_connection(('1.1.1.1', 80), timeout=3)\nprint('connected')\n", limits());
  EXPECT_NE(out.verdict, SandboxVerdict::Ok);
  EXPECT_EQ(out.stdout_text.find("connected"), std::string::npos);
}

TEST(Sandbox, StdoutIsCapped) {
  auto c = limits();
  c.stdout_byte_cap = 1000;
  const auto out = execute_program("print('x' * 100000)\n", c);
  EXPECT_TRUE(out.stdout_truncated);
  EXPECT_LE(out.stdout_text.size(), 1000u);
}

TEST(Sandbox, WorkdirRemovedUnlessKept) {
  auto c = limits();
  const auto gone = execute_program("print(1)\n", c);
  EXPECT_FALSE(std::filesystem::exists(gone.workdir));
  c.keep_sandbox = true;
  const auto kept = execute_program("print(1)\n", c);
  EXPECT_TRUE(std::filesystem::exists(kept.workdir / "main.py"));
  std::filesystem::remove_all(kept.workdir);
}

TEST(Sandbox, MissingInterpreterIsSpawnFailureOrNonzero) {
  auto c = limits();
  c.interpreter_cmd = {"definitely-not-an-interpreter"};
  try {
    const auto out = execute_program("print(1)\n", c);
    EXPECT_NE(out.verdict, SandboxVerdict::Ok);
  } catch (const SandboxSpawnFailure&) {
    SUCCEED();
  }
}

}  // namespace
}  // namespace agentic
