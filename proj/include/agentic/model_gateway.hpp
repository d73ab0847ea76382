#pragma once

#include <atomic>
#include <condition_variable>
#include <cstdint>
#include <functional>
#include <memory>
#include <mutex>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "agentic/core_types.hpp"

namespace agentic {

enum class Speaker { User, Assistant, Tool };

std::string_view speaker_name(Speaker s);

struct ChatMessage {
  Speaker speaker = Speaker::User;
  std::string content;

  bool operator==(const ChatMessage&) const = default;
};

struct ChatRequest {
  AgentRole role = AgentRole::Planner;
  std::string system_prompt;
  std::vector<ChatMessage> messages;
  bool thinking_enabled = false;
  int max_output_tokens = 4096;
  double temperature = 0.0;
  std::int64_t seed = 0;
};

struct TokenUsage {
  int prompt = 0;
  int completion = 0;

  bool operator==(const TokenUsage&) const = default;
};

struct ChatResponse {
  std::string content;
  std::optional<std::string> thinking_segment;
  TokenUsage token_usage;
  Millis latency{0};

  bool operator==(const ChatResponse&) const = default;
};

enum class GatewayErrorKind {
  Precondition,
  Timeout,
  Transport,
  Protocol,
  ParseError,
  ScriptExhausted,
  MatchFailure,
};

std::string_view gateway_error_name(GatewayErrorKind kind);
std::optional<GatewayErrorKind> gateway_error_from_name(std::string_view name);

class GatewayError : public std::runtime_error {
 public:
  GatewayError(GatewayErrorKind kind, const std::string& message);

  GatewayErrorKind kind() const noexcept { return kind_; }
  /// Timeout, Transport and Protocol failures are retried by the gateway.
  bool retryable() const noexcept;

 private:
  GatewayErrorKind kind_;
};

/// One chat-completion backend. Implementations need not be thread-safe;
/// the gateway never runs two executions at once.
class ChatBackend {
 public:
  virtual ~ChatBackend() = default;
  virtual ChatResponse execute(const ChatRequest& request) = 0;
  /// True when the backend can switch thinking off natively. Otherwise the
  /// gateway appends the no-think suffix to the system prompt.
  virtual bool supports_thinking_toggle() const = 0;
  virtual std::string describe() const = 0;
};

struct GatewayOptions {
  int retries = 2;
  std::string no_think_suffix = "/no_think";
};

/// Exclusive, first-come-first-served access to one shared backend. Callers
/// from any thread are queued by arrival ticket; at most one execution is in
/// flight at a time.
class ModelGateway {
 public:
  ModelGateway(std::unique_ptr<ChatBackend> backend, GatewayOptions options = {});

  ModelGateway(const ModelGateway&) = delete;
  ModelGateway& operator=(const ModelGateway&) = delete;

  /// Throws GatewayError. Retryable failures are attempted `retries` more
  /// times; each attempt rejoins the back of the queue.
  ChatResponse complete(ChatRequest request);

  std::uint64_t executions() const noexcept { return executions_.load(); }
  const ChatBackend& backend() const noexcept { return *backend_; }

 private:
  class Ticket;

  ChatResponse execute_once(const ChatRequest& request);

  std::unique_ptr<ChatBackend> backend_;
  GatewayOptions options_;

  std::mutex queue_mutex_;
  std::condition_variable queue_cv_;
  std::uint64_t next_ticket_ = 0;
  std::uint64_t now_serving_ = 0;
  std::atomic<std::uint64_t> executions_{0};
};

struct SamplingDefaults {
  int max_output_tokens = 4096;
  double temperature = 0.0;
  std::int64_t seed = 0;
};

/// Observes each completed model call (request as sent, response received).
using TurnObserver = std::function<void(const ChatRequest&, const ChatResponse&)>;

/// A role-tagged view onto the gateway that tool agents and the controller
/// use to issue requests. Fills sampling defaults and reports turns.
class RoleChannel {
 public:
  RoleChannel(ModelGateway& gateway, SamplingDefaults defaults, TurnObserver observer = {});

  ChatResponse ask(AgentRole role, std::string system_prompt, std::vector<ChatMessage> messages, bool thinking);
  ChatResponse ask(AgentRole role, std::string system_prompt, std::string user_message, bool thinking);

 private:
  ModelGateway& gateway_;
  SamplingDefaults defaults_;
  TurnObserver observer_;
};

/// Digest identifying the full prompt of a request (system + messages).
std::string prompt_digest(const ChatRequest& request);

/// Pulls a leading `<think>...</think>` segment (or one closed without an
/// opener) out of `content`. Returns the thinking text, if any.
std::optional<std::string> split_thinking(std::string& content);

}  // namespace agentic
