#include "agentic/controller.hpp"

#include <stdexcept>

#include "agentic/coding_agent.hpp"
#include "agentic/text_util.hpp"
#include "agentic/toolcall_parser.hpp"
#include "agentic/trace_io.hpp"

namespace agentic {

namespace {

struct ToolResult {
  std::string observation;
  std::optional<std::string> error;
};

class TaskLoop {
 public:
  TaskLoop(const Task& task, const RunConfig& config, ModelGateway& gateway, const PromptBook& prompts,
           const ToolSuite* tools)
      : task_(task),
        config_(config),
        prompts_(prompts),
        tools_(tools),
        channel_(gateway,
                 SamplingDefaults{config.backend.max_output_tokens, config.backend.temperature, config.seed},
                 [this](const ChatRequest& req, const ChatResponse& resp) { record_turn(req, resp); }) {
    run_.trace.task_id = task.id;
    run_.trace.config_snapshot = config;
  }

  TaskRun run() {
    try {
      loop();
    } catch (const GatewayError& e) {
      auto& trace = run_.trace;
      trace.terminated_by = Termination::BackendError;
      trace.final_answer.clear();
      trace.predicted_answer = std::string(kBackendErrorAnswer);
      trace.backend_error = std::string(gateway_error_name(e.kind())) + ": " + e.what();
    }
    return std::move(run_);
  }

 private:
  void record_turn(const ChatRequest& req, const ChatResponse& resp) {
    Turn turn;
    turn.role = req.role;
    turn.prompt_digest = prompt_digest(req);
    turn.raw_output = resp.content;
    turn.thinking_enabled = req.thinking_enabled;
    if (req.thinking_enabled) turn.thinking_segment = resp.thinking_segment;
    run_.trace.turns.push_back(std::move(turn));
  }

  void finish(Termination how, std::string answer) {
    auto& trace = run_.trace;
    trace.terminated_by = how;
    if (how == Termination::BudgetExhausted) {
      trace.final_answer.clear();
      trace.predicted_answer = std::string(kToolCallPlaceholder);
    } else {
      trace.final_answer = answer;
      trace.predicted_answer = std::move(answer);
    }
  }

  // One planner step: asks until the reply parses or the re-prompts run out.
  // Returns nullopt when the step ended the run.
  std::optional<ToolInvocation> planner_step() {
    const bool thinking = thinks(config_.thinking, AgentRole::Planner);
    const auto prompt = build_role_prompt(prompts_, AgentRole::Planner, task_, run_.trace.tool_calls,
                                          config_.tools_enabled);
    std::vector<ChatMessage> messages{{Speaker::User, prompt.user}};
    for (int attempt = 0;; ++attempt) {
      const auto reply = channel_.ask(AgentRole::Planner, prompt.system, messages, thinking);
      auto directive = parse_directive(reply.content);
      if (!config_.tools_enabled && std::holds_alternative<ToolInvocation>(directive)) {
        directive = Malformed{"tool calls are not available"};
      }
      if (auto* inv = std::get_if<ToolInvocation>(&directive)) return std::move(*inv);
      if (auto* fin = std::get_if<FinalAnswer>(&directive)) {
        finish(Termination::FinalAnswer, std::move(fin->text));
        return std::nullopt;
      }
      ++run_.trace.malformed_outputs;
      if (attempt == kPlannerReprompts) {
        // The scorer judges whatever the planner actually wrote.
        finish(Termination::FinalAnswer,
               std::string(text::trim(strip_thinking(text::sanitize_utf8(reply.content)))));
        return std::nullopt;
      }
      const auto& reason = std::get<Malformed>(directive).reason;
      messages.push_back({Speaker::Assistant, reply.content});
      messages.push_back({Speaker::User, prompts_.format_reminder(reason, attempt + 1 == kPlannerReprompts,
                                                                  config_.tools_enabled)});
    }
  }

  ToolResult dispatch(const ToolInvocation& inv, int index) {
    const bool thinking = thinks(config_.thinking, inv.tool);
    switch (inv.tool) {
      case AgentRole::WebSearch: {
        WebSearchOptions options;
        options.max_subqueries = config_.search.max_subqueries;
        options.top_k = config_.search.top_k;
        options.provider_retries = config_.retries_per_tool;
        auto out = run_web_search(inv.arguments, channel_, prompts_, *tools_->search, options, thinking);
        return {std::move(out.observation), std::move(out.error)};
      }
      case AgentRole::Coder: {
        auto out = run_coding_task(inv.arguments, channel_, prompts_, *tools_->code, config_.sandbox, thinking);
        return {std::move(out.observation), std::move(out.error)};
      }
      case AgentRole::MindMap:
        return {run_mindmap(inv.argument_key, inv.arguments, run_.mindmap, channel_, prompts_, tools_->stop_words,
                            config_.mindmap_top_m, thinking, index),
                std::nullopt};
      case AgentRole::Planner:
        break;
    }
    throw std::logic_error("planner is not a tool");
  }

  void loop() {
    auto& trace = run_.trace;
    while (true) {
      auto inv = planner_step();
      if (!inv) return;
      if (trace.tool_calls.size() >= static_cast<std::size_t>(config_.max_tool_calls)) {
        finish(Termination::BudgetExhausted, {});
        return;
      }
      ToolCallRecord rec;
      rec.index = static_cast<int>(trace.tool_calls.size()) + 1;
      rec.tool = inv->tool;
      rec.arguments = Json{{inv->argument_key, inv->arguments}}.dump(-1, ' ', false, Json::error_handler_t::replace);
      const auto started = std::chrono::steady_clock::now();
      try {
        auto result = dispatch(*inv, rec.index);
        rec.observation = cap_observation(result.observation, config_.observation_byte_cap);
        rec.error = std::move(result.error);
      } catch (const GatewayError& e) {
        rec.observation = "TOOL_FAILED: BackendError";
        rec.error = "BackendError";
        trace.tool_calls.push_back(std::move(rec));
        throw;
      }
      if (!config_.deterministic_timing) {
        rec.wall_time = std::chrono::duration_cast<Millis>(std::chrono::steady_clock::now() - started);
      }
      trace.tool_calls.push_back(std::move(rec));
    }
  }

  const Task& task_;
  const RunConfig& config_;
  const PromptBook& prompts_;
  const ToolSuite* tools_;
  TaskRun run_;
  RoleChannel channel_;
};

}  // namespace

ToolSuite make_tool_suite(const RunConfig& config) {
  ToolSuite suite;
  suite.search = make_search_provider(config.search, config.per_call_timeout);
  suite.code = std::make_shared<ProcessSandbox>();
  suite.stop_words = load_stop_words(resolve_assets_dir(config.assets_dir) / "stopwords.txt");
  return suite;
}

TaskRun run_task(const Task& task, const RunConfig& config, ModelGateway& gateway, const PromptBook& prompts,
                 const ToolSuite* tools) {
  validate(config);
  if (config.tools_enabled != (tools != nullptr)) {
    throw std::invalid_argument("tool suite must be supplied exactly when tools are enabled");
  }
  if (tools != nullptr && (!tools->search || !tools->code)) throw std::invalid_argument("incomplete tool suite");
  return TaskLoop(task, config, gateway, prompts, tools).run();
}

std::string cap_observation(std::string_view observation, std::size_t byte_cap) {
  auto clean = text::sanitize_utf8(observation);
  if (clean.size() <= byte_cap) return clean;
  return std::string(text::utf8_prefix(clean, byte_cap)) + std::string(kTruncatedMarker);
}

std::string record_argument_text(const ToolCallRecord& record) {
  auto doc = Json::parse(record.arguments, nullptr, false);
  if (doc.is_object() && doc.size() == 1 && doc.begin()->is_string()) return doc.begin()->get<std::string>();
  return record.arguments;
}

}  // namespace agentic
