#pragma once

#include <optional>
#include <string>
#include <vector>

#include "agentic/model_gateway.hpp"
#include "agentic/prompts.hpp"
#include "agentic/sandbox.hpp"

namespace agentic {

/// Contents of the first fenced code block, or the whole reply (trimmed) when
/// there is no fence.
std::string extract_program(std::string_view reply);

/// One model call turning `task_text` into a program.
std::string generate_program(const std::string& task_text, RoleChannel& channel, const PromptBook& prompts,
                             bool thinking);

inline constexpr std::string_view kCodeFailedPrefix = "CODE_EXECUTION_FAILED: ";
inline constexpr std::string_view kEmptyOutput = "EMPTY_OUTPUT";

struct CodingOutcome {
  std::string observation;
  std::optional<std::string> error;  // verdict (or spawn failure) when no attempt succeeded
  std::vector<SandboxOutcome> attempts;
};

/// generate -> execute, with one repair round when the verdict is not Ok.
/// Observation is "[Ok]\n<stdout>" ("[Ok]\nEMPTY_OUTPUT" for silent programs)
/// or "CODE_EXECUTION_FAILED: <verdict>". At most two model calls.
CodingOutcome run_coding_task(const std::string& task_text, RoleChannel& channel, const PromptBook& prompts,
                              CodeExecutor& executor, const SandboxConfig& limits, bool thinking);

}  // namespace agentic
