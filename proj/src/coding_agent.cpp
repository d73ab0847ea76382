#include "agentic/coding_agent.hpp"

#include "agentic/text_util.hpp"

namespace agentic {

namespace {

constexpr std::size_t kRepairStderrBytes = 2000;

std::string stderr_tail(const std::string& err) {
  auto trimmed = std::string(text::trim(err));
  if (trimmed.empty()) return "(empty)";
  if (trimmed.size() <= kRepairStderrBytes) return trimmed;
  auto start = trimmed.size() - kRepairStderrBytes;
  // Do not start inside a multi-byte sequence.
  while (start < trimmed.size() && (static_cast<unsigned char>(trimmed[start]) & 0xC0) == 0x80) ++start;
  return trimmed.substr(start);
}

std::string ok_observation(const SandboxOutcome& run) {
  std::string out = text::sanitize_utf8(run.stdout_text);
  while (!out.empty() && (out.back() == '\n' || out.back() == '\r' || out.back() == ' ')) out.pop_back();
  if (text::trim(out).empty()) return "[Ok]\n" + std::string(kEmptyOutput);
  return "[Ok]\n" + out + (run.stdout_truncated ? "\n[truncated]" : "");
}

}  // namespace

std::string extract_program(std::string_view reply) {
  const auto open = reply.find("```");
  if (open != std::string_view::npos) {
    const auto body = reply.find('\n', open);
    if (body != std::string_view::npos) {
      const auto close = reply.find("```", body + 1);
      if (close != std::string_view::npos) return std::string(reply.substr(body + 1, close - body - 1));
    }
  }
  return std::string(text::trim(reply));
}

std::string generate_program(const std::string& task_text, RoleChannel& channel, const PromptBook& prompts,
                             bool thinking) {
  const auto user = prompts.render("coder_generate", {{"TASK", task_text}});
  const auto reply = channel.ask(AgentRole::Coder, prompts.system_prompt(AgentRole::Coder, true), user, thinking);
  return extract_program(reply.content);
}

CodingOutcome run_coding_task(const std::string& task_text, RoleChannel& channel, const PromptBook& prompts,
                              CodeExecutor& executor, const SandboxConfig& limits, bool thinking) {
  CodingOutcome outcome;
  auto program = generate_program(task_text, channel, prompts, thinking);
  for (int attempt = 0; attempt < 2; ++attempt) {
    if (attempt == 1) {
      const auto& failed = outcome.attempts.back();
      const auto user = prompts.render("coder_repair", {
                                                           {"TASK", task_text},
                                                           {"PROGRAM", program},
                                                           {"VERDICT", std::string(verdict_name(failed.verdict))},
                                                           {"STDERR", stderr_tail(failed.stderr_text)},
                                                       });
      const auto reply = channel.ask(AgentRole::Coder, prompts.system_prompt(AgentRole::Coder, true), user, thinking);
      program = extract_program(reply.content);
    }
    try {
      outcome.attempts.push_back(executor.execute(program, limits));
    } catch (const SandboxSpawnFailure&) {
      outcome.error = "SandboxSpawnFailure";
      outcome.observation = std::string(kCodeFailedPrefix) + "SandboxSpawnFailure";
      return outcome;
    }
    const auto& run = outcome.attempts.back();
    if (run.verdict == SandboxVerdict::Ok) {
      outcome.observation = ok_observation(run);
      return outcome;
    }
  }
  const auto verdict = std::string(verdict_name(outcome.attempts.back().verdict));
  outcome.error = verdict;
  outcome.observation = std::string(kCodeFailedPrefix) + verdict;
  return outcome;
}

}  // namespace agentic
