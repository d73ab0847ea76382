#pragma once

#include <array>
#include <chrono>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace agentic {

using Millis = std::chrono::milliseconds;

// Answer recorded when the tool-call budget runs out while the planner is
// still issuing invocations. Matches the opening tag of the call grammar.
inline constexpr std::string_view kToolCallPlaceholder = "<tool_call>";
// Answer recorded when the backend fails past its retry allowance.
inline constexpr std::string_view kBackendErrorAnswer = "BACKEND_ERROR";

class ValidationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// ---------------------------------------------------------------------------
// Roles and thinking policy
// ---------------------------------------------------------------------------

enum class AgentRole { Planner, WebSearch, Coder, MindMap };

inline constexpr std::array<AgentRole, 4> kAllRoles{AgentRole::Planner, AgentRole::WebSearch,
                                                    AgentRole::Coder, AgentRole::MindMap};
inline constexpr std::array<AgentRole, 3> kToolRoles{AgentRole::WebSearch, AgentRole::Coder,
                                                     AgentRole::MindMap};

/// Wire name: "planner", "web_search", "code", "mind_map". The tool names are
/// the ones the planner writes inside a tool-call block.
std::string_view role_name(AgentRole role);
std::optional<AgentRole> role_from_name(std::string_view name);

enum class ThinkingPolicy { None, PlannerOnly, Full };

std::string_view policy_name(ThinkingPolicy policy);        // none | planner | full
std::string_view policy_table_label(ThinkingPolicy policy);  // NO | PLANNER | YES
std::optional<ThinkingPolicy> policy_from_name(std::string_view name);

/// Whether requests issued under `role` enable explicit thinking.
constexpr bool thinks(ThinkingPolicy policy, AgentRole role) {
  switch (policy) {
    case ThinkingPolicy::None:
      return false;
    case ThinkingPolicy::PlannerOnly:
      return role == AgentRole::Planner;
    case ThinkingPolicy::Full:
      return true;
  }
  return false;
}

// ---------------------------------------------------------------------------
// Tasks
// ---------------------------------------------------------------------------

struct AnswerShape {
  enum class Kind { FreeText, Integer, Decimal, CommaList, CodeToken };

  Kind kind = Kind::FreeText;
  // CodeToken: required token length. CommaList: required arity, 0 = take it
  // from the gold answer.
  std::size_t length = 0;

  bool operator==(const AnswerShape&) const = default;
};

/// Parses "free_text", "integer", "decimal", "comma_list", "comma_list(N)",
/// "code_token(N)". Throws ValidationError on anything else.
AnswerShape parse_answer_shape(std::string_view text);
std::string format_answer_shape(const AnswerShape& shape);

struct Task {
  std::string id;
  std::string question;
  int level = 1;
  std::string gold_answer;
  std::optional<AnswerShape> answer_shape;
  std::vector<std::string> attachments;

  bool operator==(const Task&) const = default;
};

// ---------------------------------------------------------------------------
// Run configuration
// ---------------------------------------------------------------------------

enum class ThinkingControl {
  TemplateFlag,  // chat_template_kwargs.enable_thinking on the request body
  PromptSuffix,  // append no_think_suffix to the system prompt
};

struct BackendConfig {
  enum class Kind { Scripted, Http };

  Kind kind = Kind::Scripted;
  std::string script_path;
  std::string url;
  std::string model = "default";
  // Name of the environment variable holding the bearer token. The token
  // itself never enters a config snapshot.
  std::string api_key_env = "AGENTIC_API_KEY";
  ThinkingControl thinking_control = ThinkingControl::TemplateFlag;
  std::string no_think_suffix = "/no_think";
  double temperature = 0.0;
  int max_output_tokens = 4096;

  bool operator==(const BackendConfig&) const = default;
};

struct SearchConfig {
  enum class Kind { Fixture, Live };

  Kind kind = Kind::Fixture;
  std::string fixture_dir;
  std::string endpoint;
  std::string api_key_env = "AGENTIC_SEARCH_API_KEY";
  std::string auth_header = "Authorization";
  std::size_t top_k = 5;
  std::size_t max_subqueries = 3;

  bool operator==(const SearchConfig&) const = default;
};

/// Network access is always denied inside the sandbox; there is no switch.
struct SandboxConfig {
  std::vector<std::string> interpreter_cmd{"python3"};
  std::string source_filename = "main.py";
  Millis wall_time{10000};
  std::uint64_t memory_bytes = 512ull << 20;
  std::size_t stdout_byte_cap = 64 * 1024;
  bool keep_sandbox = false;

  bool operator==(const SandboxConfig&) const = default;
};

struct RunConfig {
  BackendConfig backend;
  bool tools_enabled = true;
  ThinkingPolicy thinking = ThinkingPolicy::None;
  int max_tool_calls = 15;
  Millis per_call_timeout{120000};
  SandboxConfig sandbox;
  SearchConfig search;
  std::int64_t seed = 0;
  int retries_per_tool = 2;
  std::size_t observation_byte_cap = 4096;
  std::size_t mindmap_top_m = 8;
  std::string assets_dir;
  // Record every duration as zero so traces are byte-stable across runs.
  bool deterministic_timing = false;

  bool operator==(const RunConfig&) const = default;
};

/// Throws ValidationError naming the first offending field.
void validate(const RunConfig& config);

// ---------------------------------------------------------------------------
// Traces
// ---------------------------------------------------------------------------

struct ToolCallRecord {
  int index = 0;  // 1-based, gap-free within a trace
  AgentRole tool = AgentRole::WebSearch;
  std::string arguments;
  std::string observation;
  Millis wall_time{0};
  std::optional<std::string> error;

  bool operator==(const ToolCallRecord&) const = default;
};

struct Turn {
  AgentRole role = AgentRole::Planner;
  std::string prompt_digest;
  std::string raw_output;
  std::optional<std::string> thinking_segment;
  bool thinking_enabled = false;

  bool operator==(const Turn&) const = default;
};

enum class Termination { FinalAnswer, BudgetExhausted, BackendError };

std::string_view termination_name(Termination t);
std::optional<Termination> termination_from_name(std::string_view name);

struct Trace {
  std::string task_id;
  RunConfig config_snapshot;
  std::vector<Turn> turns;
  std::vector<ToolCallRecord> tool_calls;
  std::string final_answer;
  Termination terminated_by = Termination::FinalAnswer;
  std::string predicted_answer;
  // Planner outputs that parsed as Malformed (each consumed a re-prompt or
  // ended the run).
  int malformed_outputs = 0;
  std::optional<std::string> backend_error;

  bool operator==(const Trace&) const = default;

  std::size_t count_calls(AgentRole tool) const;
  std::size_t planner_turns() const;
};

/// Every broken Trace invariant, as human-readable lines. Empty when valid.
std::vector<std::string> trace_violations(const Trace& trace);

}  // namespace agentic
