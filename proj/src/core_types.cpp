#include "agentic/core_types.hpp"

#include <algorithm>
#include <charconv>

namespace agentic {

std::string_view role_name(AgentRole role) {
  switch (role) {
    case AgentRole::Planner:
      return "planner";
    case AgentRole::WebSearch:
      return "web_search";
    case AgentRole::Coder:
      return "code";
    case AgentRole::MindMap:
      return "mind_map";
  }
  return "planner";
}

std::optional<AgentRole> role_from_name(std::string_view name) {
  for (AgentRole r : kAllRoles) {
    if (role_name(r) == name) return r;
  }
  return std::nullopt;
}

std::string_view policy_name(ThinkingPolicy policy) {
  switch (policy) {
    case ThinkingPolicy::None:
      return "none";
    case ThinkingPolicy::PlannerOnly:
      return "planner";
    case ThinkingPolicy::Full:
      return "full";
  }
  return "none";
}

std::string_view policy_table_label(ThinkingPolicy policy) {
  switch (policy) {
    case ThinkingPolicy::None:
      return "NO";
    case ThinkingPolicy::PlannerOnly:
      return "PLANNER";
    case ThinkingPolicy::Full:
      return "YES";
  }
  return "NO";
}

std::optional<ThinkingPolicy> policy_from_name(std::string_view name) {
  for (auto p : {ThinkingPolicy::None, ThinkingPolicy::PlannerOnly, ThinkingPolicy::Full}) {
    if (policy_name(p) == name) return p;
  }
  return std::nullopt;
}

namespace {

std::size_t parse_shape_arg(std::string_view text, std::string_view prefix) {
  // prefix "(" digits ")"
  std::string_view rest = text.substr(prefix.size());
  if (rest.size() < 3 || rest.front() != '(' || rest.back() != ')') {
    throw ValidationError("malformed answer shape: " + std::string(text));
  }
  rest = rest.substr(1, rest.size() - 2);
  std::size_t value = 0;
  auto [ptr, ec] = std::from_chars(rest.data(), rest.data() + rest.size(), value);
  if (ec != std::errc{} || ptr != rest.data() + rest.size() || value == 0) {
    throw ValidationError("malformed answer shape length: " + std::string(text));
  }
  return value;
}

}  // namespace

AnswerShape parse_answer_shape(std::string_view text) {
  using K = AnswerShape::Kind;
  if (text == "free_text") return {K::FreeText, 0};
  if (text == "integer") return {K::Integer, 0};
  if (text == "decimal") return {K::Decimal, 0};
  if (text == "comma_list") return {K::CommaList, 0};
  if (text.starts_with("comma_list(")) return {K::CommaList, parse_shape_arg(text, "comma_list")};
  if (text.starts_with("code_token(")) return {K::CodeToken, parse_shape_arg(text, "code_token")};
  throw ValidationError("unknown answer shape: " + std::string(text));
}

std::string format_answer_shape(const AnswerShape& shape) {
  using K = AnswerShape::Kind;
  switch (shape.kind) {
    case K::FreeText:
      return "free_text";
    case K::Integer:
      return "integer";
    case K::Decimal:
      return "decimal";
    case K::CommaList:
      return shape.length == 0 ? "comma_list" : "comma_list(" + std::to_string(shape.length) + ")";
    case K::CodeToken:
      return "code_token(" + std::to_string(shape.length) + ")";
  }
  return "free_text";
}

void validate(const RunConfig& config) {
  if (config.max_tool_calls < 1) throw ValidationError("max_tool_calls must be >= 1");
  if (config.retries_per_tool < 0) throw ValidationError("retries_per_tool must be >= 0");
  if (config.per_call_timeout.count() <= 0) throw ValidationError("per_call_timeout must be positive");
  if (config.sandbox.interpreter_cmd.empty() || config.sandbox.interpreter_cmd.front().empty()) {
    throw ValidationError("sandbox.interpreter_cmd must not be empty");
  }
  if (config.sandbox.wall_time.count() <= 0) throw ValidationError("sandbox.wall_time must be positive");
  if (config.sandbox.memory_bytes == 0) throw ValidationError("sandbox.memory_bytes must be positive");
  if (config.search.top_k == 0) throw ValidationError("search.top_k must be >= 1");
  if (config.search.max_subqueries == 0) throw ValidationError("search.max_subqueries must be >= 1");
  if (config.mindmap_top_m == 0) throw ValidationError("mindmap_top_m must be >= 1");
  if (config.backend.max_output_tokens <= 0) throw ValidationError("backend.max_output_tokens must be positive");
  if (config.backend.temperature < 0.0) throw ValidationError("backend.temperature must be non-negative");
  if (config.backend.kind == BackendConfig::Kind::Http && config.backend.url.empty()) {
    throw ValidationError("backend.url is required for the http backend");
  }
}

std::string_view termination_name(Termination t) {
  switch (t) {
    case Termination::FinalAnswer:
      return "FinalAnswer";
    case Termination::BudgetExhausted:
      return "BudgetExhausted";
    case Termination::BackendError:
      return "BackendError";
  }
  return "FinalAnswer";
}

std::optional<Termination> termination_from_name(std::string_view name) {
  for (auto t : {Termination::FinalAnswer, Termination::BudgetExhausted, Termination::BackendError}) {
    if (termination_name(t) == name) return t;
  }
  return std::nullopt;
}

std::size_t Trace::count_calls(AgentRole tool) const {
  return static_cast<std::size_t>(
      std::count_if(tool_calls.begin(), tool_calls.end(), [&](const ToolCallRecord& r) { return r.tool == tool; }));
}

std::size_t Trace::planner_turns() const {
  return static_cast<std::size_t>(
      std::count_if(turns.begin(), turns.end(), [](const Turn& t) { return t.role == AgentRole::Planner; }));
}

std::vector<std::string> trace_violations(const Trace& trace) {
  std::vector<std::string> out;
  const auto& cfg = trace.config_snapshot;
  if (trace.tool_calls.size() > static_cast<std::size_t>(cfg.max_tool_calls)) {
    out.push_back("tool_calls exceed max_tool_calls");
  }
  if (!cfg.tools_enabled && !trace.tool_calls.empty()) {
    out.push_back("tool calls recorded with tools disabled");
  }
  for (std::size_t i = 0; i < trace.tool_calls.size(); ++i) {
    const auto& rec = trace.tool_calls[i];
    if (rec.index != static_cast<int>(i) + 1) out.push_back("tool call index gap at position " + std::to_string(i));
    if (rec.tool == AgentRole::Planner) out.push_back("tool call attributed to planner");
  }
  switch (trace.terminated_by) {
    case Termination::BudgetExhausted:
      if (trace.predicted_answer != kToolCallPlaceholder) {
        out.push_back("BudgetExhausted without placeholder answer");
      }
      if (trace.tool_calls.size() != static_cast<std::size_t>(cfg.max_tool_calls)) {
        out.push_back("BudgetExhausted before the budget was used");
      }
      break;
    case Termination::FinalAnswer:
      if (trace.predicted_answer != trace.final_answer) out.push_back("predicted_answer differs from final_answer");
      // An empty answer is only possible when the planner never produced a
      // parseable directive and its raw (empty) output was recorded.
      if (trace.final_answer.empty() && trace.malformed_outputs == 0) out.push_back("empty final_answer");
      break;
    case Termination::BackendError:
      if (trace.predicted_answer != kBackendErrorAnswer) out.push_back("BackendError without BACKEND_ERROR answer");
      break;
  }
  return out;
}

}  // namespace agentic
