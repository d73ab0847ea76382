#include <gtest/gtest.h>

#include <cmath>
#include <deque>

#include "agentic/coding_agent.hpp"
#include "agentic/text_util.hpp"
#include "test_support.hpp"

namespace agentic {
namespace {

const PromptBook& book() {
  static const PromptBook b = PromptBook::load_default();
  return b;
}

struct Replies {
  std::vector<std::string> prompts;
  std::unique_ptr<ModelGateway> gateway;
  std::unique_ptr<RoleChannel> channel;

  explicit Replies(std::deque<std::string> replies) {
    auto queue = std::make_shared<std::deque<std::string>>(std::move(replies));
    gateway = std::make_unique<ModelGateway>(std::make_unique<testing::LambdaBackend>([this, queue](const ChatRequest& r) {
      prompts.push_back(r.messages.back().content);
      if (queue->empty()) throw GatewayError(GatewayErrorKind::ScriptExhausted, "no reply");
      auto next = queue->front();
      queue->pop_front();
      return testing::reply(next);
    }));
    channel = std::make_unique<RoleChannel>(*gateway, SamplingDefaults{});
  }
};

class FakeExecutor final : public CodeExecutor {
 public:
  std::vector<SandboxOutcome> outcomes;
  std::vector<std::string> sources;
  bool spawn_failure = false;

  SandboxOutcome execute(const std::string& source, const SandboxConfig&) override {
    if (spawn_failure) throw SandboxSpawnFailure("no isolation");
    sources.push_back(source);
    auto out = outcomes.at(sources.size() - 1);
    return out;
  }
};

SandboxOutcome outcome(SandboxVerdict v, std::string out, std::string err = "") {
  SandboxOutcome o;
  o.verdict = v;
  o.stdout_text = std::move(out);
  o.stderr_text = std::move(err);
  o.exit_status = v == SandboxVerdict::Ok ? 0 : 1;
  return o;
}

TEST(ExtractProgram, SingleFence) { EXPECT_EQ(extract_program("Here:\n```python\nprint(3)\n```\nDone."), "print(3)\n"); }

TEST(ExtractProgram, FirstOfTwoFences) {
  EXPECT_EQ(extract_program("```python\nprint(1)\n```\ntext\n```python\nprint(2)\n```"), "print(1)\n");
}

TEST(ExtractProgram, NoFenceUsesWholeReply) { EXPECT_EQ(extract_program("  print(3)  \n"), "print(3)"); }

TEST(RunCodingTask, HappyPath) {
  Replies r({"```python\nprint(3)\n```"});
  FakeExecutor exec;
  exec.outcomes = {outcome(SandboxVerdict::Ok, "3\n")};
  const auto out = run_coding_task("towers", *r.channel, book(), exec, {}, false);
  EXPECT_EQ(out.observation, "[Ok]\n3");
  EXPECT_FALSE(out.error.has_value());
  EXPECT_EQ(exec.sources.front(), "print(3)\n");
  EXPECT_EQ(r.prompts.size(), 1u);
}

TEST(RunCodingTask, SilentProgram) {
  Replies r({"```python\npass\n```"});
  FakeExecutor exec;
  exec.outcomes = {outcome(SandboxVerdict::Ok, "")};
  EXPECT_EQ(run_coding_task("t", *r.channel, book(), exec, {}, false).observation, "[Ok]\nEMPTY_OUTPUT");
}

TEST(RunCodingTask, RepairAfterCrash) {
  const std::string task = "Calculate the time in hours it takes to travel 363104 km at a constant speed of 20.92 km/h.";
  Replies r({"```python\nprint(363104 / 0)\n```", "```python\nprint(363104 / 20.92)\n```"});
  FakeExecutor exec;
  exec.outcomes = {outcome(SandboxVerdict::NonzeroExit, "", "ZeroDivisionError: division by zero"),
                   outcome(SandboxVerdict::Ok, "17356.78776290631\n")};
  const auto out = run_coding_task(task, *r.channel, book(), exec, {}, false);
  EXPECT_EQ(out.observation, "[Ok]\n17356.78776290631");
  ASSERT_EQ(r.prompts.size(), 2u);
  EXPECT_NE(r.prompts[1].find("ZeroDivisionError"), std::string::npos);
  EXPECT_NE(r.prompts[1].find("print(363104 / 0)"), std::string::npos);
  EXPECT_EQ(out.attempts.size(), 2u);
}

TEST(RunCodingTask, BothAttemptsFail) {
  Replies r({"```python\nwhile True: pass\n```", "```python\nwhile True: pass\n```"});
  FakeExecutor exec;
  exec.outcomes = {outcome(SandboxVerdict::Timeout, ""), outcome(SandboxVerdict::Timeout, "")};
  const auto out = run_coding_task("t", *r.channel, book(), exec, {}, false);
  EXPECT_EQ(out.observation, "CODE_EXECUTION_FAILED: Timeout");
  EXPECT_EQ(out.error, "Timeout");
}

TEST(RunCodingTask, SpawnFailure) {
  Replies r({"```python\nprint(1)\n```"});
  FakeExecutor exec;
  exec.spawn_failure = true;
  const auto out = run_coding_task("t", *r.channel, book(), exec, {}, false);
  EXPECT_EQ(out.error, "SandboxSpawnFailure");
  EXPECT_TRUE(out.observation.starts_with(kCodeFailedPrefix));
}

TEST(RunCodingTask, RealSandboxComputesPerigeeTravelTime) {
  const double oracle = 363104.0 / 20.92;
  Replies r({"```python\nprint(round(363104 / 20.92, 2))\n```"});
  ProcessSandbox sandbox;
  SandboxConfig c;
  const auto out = run_coding_task("Calculate the time in hours it takes to travel 363104 km at a constant speed of 20.92 km/h.",
                                   *r.channel, book(), sandbox, c, false);
  ASSERT_TRUE(out.observation.starts_with("[Ok]\n")) << out.observation;
  EXPECT_NEAR(std::stod(out.observation.substr(5)), oracle, 0.005);
  EXPECT_EQ(out.observation, "[Ok]\n17356.79");
}

}  // namespace
}  // namespace agentic
