#pragma once

#include <string>

#include <json.hpp>

#include "agentic/model_gateway.hpp"

namespace agentic {

struct UrlParts {
  std::string scheme_host_port;  // "http://127.0.0.1:8000"
  std::string path;              // "/v1", never ending in '/'
};

/// Throws std::invalid_argument for URLs without an http/https scheme.
UrlParts split_url(std::string_view url);

struct HttpBackendOptions {
  std::string url;  // base, e.g. http://127.0.0.1:8000/v1
  std::string model;
  std::string api_key;  // empty: no Authorization header
  ThinkingControl thinking_control = ThinkingControl::TemplateFlag;
  Millis timeout{120000};
};

/// Chat-completions client for OpenAI-compatible inference servers
/// (vLLM, SGLang, llama.cpp server, ...). POSTs `<url>/chat/completions`.
class HttpChatBackend final : public ChatBackend {
 public:
  explicit HttpChatBackend(HttpBackendOptions options);

  ChatResponse execute(const ChatRequest& request) override;
  bool supports_thinking_toggle() const override {
    return options_.thinking_control == ThinkingControl::TemplateFlag;
  }
  std::string describe() const override { return "http:" + options_.url; }

  /// Request body exactly as sent on the wire.
  nlohmann::ordered_json build_body(const ChatRequest& request) const;
  /// Throws GatewayError(Protocol) when the reply lacks choices[0].message.
  static ChatResponse parse_reply(std::string_view body);

 private:
  HttpBackendOptions options_;
  UrlParts url_;
};

}  // namespace agentic
