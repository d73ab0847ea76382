#pragma once

#include <string>
#include <string_view>
#include <variant>

#include "agentic/core_types.hpp"

namespace agentic {

// Planner output grammar:
//
//   <tool_call>{"name": "web_search|code|mind_map",
//               "arguments": {"query"|"task": "<text>"}}</tool_call>
//   FINAL ANSWER: <text>
//
// The first well-formed tool-call block wins over any final-answer line.
// Otherwise the last non-empty `FINAL ANSWER:` line outside tool-call blocks
// is the answer. Anything else is Malformed.

struct ToolInvocation {
  AgentRole tool = AgentRole::WebSearch;
  std::string argument_key = "query";  // "query" or "task"
  std::string arguments;               // trimmed, never empty

  bool operator==(const ToolInvocation&) const = default;
};

struct FinalAnswer {
  std::string text;

  bool operator==(const FinalAnswer&) const = default;
};

struct Malformed {
  std::string reason;

  bool operator==(const Malformed&) const = default;
};

using PlannerDirective = std::variant<ToolInvocation, FinalAnswer, Malformed>;

inline constexpr std::string_view kToolCallOpen = "<tool_call>";
inline constexpr std::string_view kToolCallClose = "</tool_call>";
inline constexpr std::string_view kFinalAnswerPrefix = "FINAL ANSWER:";

/// Total: never throws. Invalid UTF-8 is replaced before parsing and any
/// `<think>` segment is removed.
PlannerDirective parse_directive(std::string_view raw_output);

/// Removes every `<think>...</think>` segment, a leading segment closed by
/// `</think>` without an opener, and an unterminated trailing `<think>`.
std::string strip_thinking(std::string_view text);

/// Canonical text of an invocation; parse_directive(render(x)) == x.
std::string render_invocation(const ToolInvocation& invocation);

}  // namespace agentic
