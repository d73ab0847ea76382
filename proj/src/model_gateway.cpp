#include "agentic/model_gateway.hpp"

#include "agentic/text_util.hpp"

namespace agentic {

std::string_view speaker_name(Speaker s) {
  switch (s) {
    case Speaker::User:
      return "user";
    case Speaker::Assistant:
      return "assistant";
    case Speaker::Tool:
      return "tool";
  }
  return "user";
}

std::string_view gateway_error_name(GatewayErrorKind kind) {
  switch (kind) {
    case GatewayErrorKind::Precondition:
      return "Precondition";
    case GatewayErrorKind::Timeout:
      return "Timeout";
    case GatewayErrorKind::Transport:
      return "Transport";
    case GatewayErrorKind::Protocol:
      return "Protocol";
    case GatewayErrorKind::ParseError:
      return "ParseError";
    case GatewayErrorKind::ScriptExhausted:
      return "ScriptExhausted";
    case GatewayErrorKind::MatchFailure:
      return "MatchFailure";
  }
  return "Protocol";
}

std::optional<GatewayErrorKind> gateway_error_from_name(std::string_view name) {
  for (auto k : {GatewayErrorKind::Precondition, GatewayErrorKind::Timeout, GatewayErrorKind::Transport,
                 GatewayErrorKind::Protocol, GatewayErrorKind::ParseError, GatewayErrorKind::ScriptExhausted,
                 GatewayErrorKind::MatchFailure}) {
    if (gateway_error_name(k) == name) return k;
  }
  return std::nullopt;
}

GatewayError::GatewayError(GatewayErrorKind kind, const std::string& message)
    : std::runtime_error(std::string(gateway_error_name(kind)) + ": " + message), kind_(kind) {}

bool GatewayError::retryable() const noexcept {
  return kind_ == GatewayErrorKind::Timeout || kind_ == GatewayErrorKind::Transport ||
         kind_ == GatewayErrorKind::Protocol;
}

// Holds the gateway's execution slot for one attempt, in ticket order.
class ModelGateway::Ticket {
 public:
  explicit Ticket(ModelGateway& gw) : gw_(gw) {
    std::unique_lock lock(gw_.queue_mutex_);
    const std::uint64_t mine = gw_.next_ticket_++;
    gw_.queue_cv_.wait(lock, [&] { return gw_.now_serving_ == mine; });
  }
  ~Ticket() {
    {
      std::lock_guard lock(gw_.queue_mutex_);
      ++gw_.now_serving_;
    }
    gw_.queue_cv_.notify_all();
  }
  Ticket(const Ticket&) = delete;
  Ticket& operator=(const Ticket&) = delete;

 private:
  ModelGateway& gw_;
};

ModelGateway::ModelGateway(std::unique_ptr<ChatBackend> backend, GatewayOptions options)
    : backend_(std::move(backend)), options_(std::move(options)) {
  if (!backend_) throw std::invalid_argument("ModelGateway requires a backend");
}

ChatResponse ModelGateway::execute_once(const ChatRequest& request) {
  Ticket ticket(*this);
  executions_.fetch_add(1);
  return backend_->execute(request);
}

ChatResponse ModelGateway::complete(ChatRequest request) {
  if (request.messages.empty()) throw GatewayError(GatewayErrorKind::Precondition, "request has no messages");
  if (text::trim(request.system_prompt).empty()) {
    throw GatewayError(GatewayErrorKind::Precondition, "request has an empty system prompt");
  }
  if (!request.thinking_enabled && !backend_->supports_thinking_toggle() && !options_.no_think_suffix.empty()) {
    request.system_prompt += "\n" + options_.no_think_suffix;
  }

  const int attempts = 1 + std::max(0, options_.retries);
  for (int attempt = 1;; ++attempt) {
    try {
      ChatResponse response = execute_once(request);
      if (!request.thinking_enabled) response.thinking_segment.reset();
      return response;
    } catch (const GatewayError& e) {
      if (!e.retryable() || attempt >= attempts) throw;
    }
  }
}

RoleChannel::RoleChannel(ModelGateway& gateway, SamplingDefaults defaults, TurnObserver observer)
    : gateway_(gateway), defaults_(defaults), observer_(std::move(observer)) {}

ChatResponse RoleChannel::ask(AgentRole role, std::string system_prompt, std::vector<ChatMessage> messages,
                              bool thinking) {
  ChatRequest request;
  request.role = role;
  request.system_prompt = std::move(system_prompt);
  request.messages = std::move(messages);
  request.thinking_enabled = thinking;
  request.max_output_tokens = defaults_.max_output_tokens;
  request.temperature = defaults_.temperature;
  request.seed = defaults_.seed;
  ChatResponse response = gateway_.complete(request);
  if (observer_) observer_(request, response);
  return response;
}

ChatResponse RoleChannel::ask(AgentRole role, std::string system_prompt, std::string user_message, bool thinking) {
  return ask(role, std::move(system_prompt), {ChatMessage{Speaker::User, std::move(user_message)}}, thinking);
}

std::string prompt_digest(const ChatRequest& request) {
  std::string material = "system\n" + request.system_prompt;
  for (const auto& m : request.messages) {
    material += "\n\x1e";
    material += speaker_name(m.speaker);
    material += "\n" + m.content;
  }
  return text::sha256_hex(material).substr(0, 16);
}

std::optional<std::string> split_thinking(std::string& content) {
  static constexpr std::string_view kOpen = "<think>";
  static constexpr std::string_view kClose = "</think>";
  const auto close = content.find(kClose);
  const auto open = content.find(kOpen);
  if (close == std::string::npos) {
    if (open == std::string::npos) return std::nullopt;
    // Unterminated: everything after the opener is thinking.
    std::string thought(text::trim(std::string_view(content).substr(open + kOpen.size())));
    content.erase(open);
    return thought;
  }
  const std::size_t body_start = (open != std::string::npos && open < close) ? open + kOpen.size() : 0;
  const std::size_t erase_from = (open != std::string::npos && open < close) ? open : 0;
  std::string thought(text::trim(std::string_view(content).substr(body_start, close - body_start)));
  content.erase(erase_from, close + kClose.size() - erase_from);
  content = std::string(text::trim(content));
  return thought;
}

}  // namespace agentic
