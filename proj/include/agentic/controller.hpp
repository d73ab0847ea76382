#pragma once

#include <memory>
#include <optional>
#include <string>
#include <unordered_set>

#include "agentic/core_types.hpp"
#include "agentic/mindmap_agent.hpp"
#include "agentic/model_gateway.hpp"
#include "agentic/prompts.hpp"
#include "agentic/sandbox.hpp"
#include "agentic/websearch_agent.hpp"

namespace agentic {

/// Collaborators of the tool agents. Shared read-only across tasks; each
/// task builds its own knowledge graph.
struct ToolSuite {
  std::shared_ptr<SearchProvider> search;
  std::shared_ptr<CodeExecutor> code;
  std::unordered_set<std::string> stop_words;
};

/// Builds the default suite for `config`: fixture or live search, the process
/// sandbox, and the stop-word asset.
ToolSuite make_tool_suite(const RunConfig& config);

/// Replies a malformed planner output may be followed by before the run ends
/// with the raw output as its answer. The last one uses the final reminder.
inline constexpr int kPlannerReprompts = 3;

inline constexpr std::string_view kTruncatedMarker = "\n[truncated]";

struct TaskRun {
  Trace trace;
  KnowledgeGraph mindmap;
};

/// Runs the plan-act loop for one task. `tools` must be non-null exactly
/// when config.tools_enabled. Never throws for model or tool failures; those
/// end the trace with a BackendError termination or an error-tagged record.
TaskRun run_task(const Task& task, const RunConfig& config, ModelGateway& gateway, const PromptBook& prompts,
                 const ToolSuite* tools);

/// Observation as it re-enters the planner context.
std::string cap_observation(std::string_view observation, std::size_t byte_cap);

/// The text argument of a recorded tool call (its single JSON value).
std::string record_argument_text(const ToolCallRecord& record);

}  // namespace agentic
