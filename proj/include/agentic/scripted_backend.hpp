#pragma once

#include <filesystem>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "agentic/model_gateway.hpp"

namespace agentic {

/// One scripted reply. `match`, when set, must occur in the request's last
/// user message or the step fails with MatchFailure. `fail` makes the step
/// raise the named gateway error instead of replying.
struct ScriptStep {
  std::optional<std::string> match;
  std::string response;
  std::optional<std::string> thinking;
  Millis latency{0};
  std::optional<GatewayErrorKind> fail;
};

/// Replays a fixed list of replies in order. Deterministic: latency and
/// token usage are derived from the script, not measured.
class ScriptedBackend final : public ChatBackend {
 public:
  explicit ScriptedBackend(std::vector<ScriptStep> steps, Millis per_call_timeout = Millis{0});

  ChatResponse execute(const ChatRequest& request) override;
  bool supports_thinking_toggle() const override { return true; }
  std::string describe() const override { return "scripted"; }

  std::size_t consumed() const;
  std::size_t size() const { return steps_.size(); }

 private:
  std::vector<ScriptStep> steps_;
  Millis per_call_timeout_;
  mutable std::mutex mutex_;
  std::size_t cursor_ = 0;
};

/// Reads a script: a JSON array of steps, or an object with a "steps" array.
/// A directory path resolves to `<dir>/script.json`. Throws GatewayError
/// (ParseError) on malformed input.
std::vector<ScriptStep> parse_script(std::string_view text);
std::unique_ptr<ScriptedBackend> load_script(const std::filesystem::path& path, Millis per_call_timeout = Millis{0});

}  // namespace agentic
