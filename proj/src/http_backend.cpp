#include "agentic/http_backend.hpp"

#include <httplib.h>

#include <stdexcept>

namespace agentic {

UrlParts split_url(std::string_view url) {
  const auto scheme_end = url.find("://");
  if (scheme_end == std::string_view::npos) throw std::invalid_argument("URL lacks a scheme: " + std::string(url));
  const auto scheme = url.substr(0, scheme_end);
  if (scheme != "http" && scheme != "https") {
    throw std::invalid_argument("unsupported URL scheme: " + std::string(url));
  }
  const auto host_start = scheme_end + 3;
  const auto path_start = url.find('/', host_start);
  UrlParts parts;
  if (path_start == std::string_view::npos) {
    parts.scheme_host_port = std::string(url);
  } else {
    parts.scheme_host_port = std::string(url.substr(0, path_start));
    parts.path = std::string(url.substr(path_start));
  }
  while (!parts.path.empty() && parts.path.back() == '/') parts.path.pop_back();
  if (parts.scheme_host_port.size() <= host_start) throw std::invalid_argument("URL lacks a host: " + std::string(url));
  return parts;
}

HttpChatBackend::HttpChatBackend(HttpBackendOptions options)
    : options_(std::move(options)), url_(split_url(options_.url)) {}

nlohmann::ordered_json HttpChatBackend::build_body(const ChatRequest& request) const {
  nlohmann::ordered_json body;
  body["model"] = options_.model;
  auto messages = nlohmann::ordered_json::array();
  messages.push_back({{"role", "system"}, {"content", request.system_prompt}});
  for (const auto& m : request.messages) {
    // Observations go back to the model as user turns; the planner protocol
    // carries no tool-call ids.
    const char* role = m.speaker == Speaker::Assistant ? "assistant" : "user";
    messages.push_back({{"role", role}, {"content", m.content}});
  }
  body["messages"] = std::move(messages);
  body["temperature"] = request.temperature;
  body["max_tokens"] = request.max_output_tokens;
  body["seed"] = request.seed;
  body["stream"] = false;
  if (options_.thinking_control == ThinkingControl::TemplateFlag) {
    body["chat_template_kwargs"] = {{"enable_thinking", request.thinking_enabled}};
  }
  return body;
}

ChatResponse HttpChatBackend::parse_reply(std::string_view text) {
  auto doc = nlohmann::json::parse(text, nullptr, false);
  if (doc.is_discarded() || !doc.is_object()) throw GatewayError(GatewayErrorKind::Protocol, "reply is not a JSON object");
  auto choices = doc.find("choices");
  if (choices == doc.end() || !choices->is_array() || choices->empty()) {
    throw GatewayError(GatewayErrorKind::Protocol, "reply has no choices");
  }
  const auto& first = (*choices)[0];
  if (!first.is_object() || !first.contains("message") || !first["message"].is_object()) {
    throw GatewayError(GatewayErrorKind::Protocol, "reply choice has no message");
  }
  const auto& message = first["message"];
  ChatResponse response;
  if (auto c = message.find("content"); c != message.end()) {
    if (c->is_string()) {
      response.content = c->get<std::string>();
    } else if (!c->is_null()) {
      throw GatewayError(GatewayErrorKind::Protocol, "message content is neither string nor null");
    }
  }
  for (const char* key : {"reasoning_content", "reasoning"}) {
    if (auto r = message.find(key); r != message.end() && r->is_string() && !r->get<std::string>().empty()) {
      response.thinking_segment = r->get<std::string>();
      break;
    }
  }
  if (!response.thinking_segment) response.thinking_segment = split_thinking(response.content);
  if (auto usage = doc.find("usage"); usage != doc.end() && usage->is_object()) {
    response.token_usage.prompt = usage->value("prompt_tokens", 0);
    response.token_usage.completion = usage->value("completion_tokens", 0);
  }
  return response;
}

ChatResponse HttpChatBackend::execute(const ChatRequest& request) {
  httplib::Client client(url_.scheme_host_port);
  client.set_connection_timeout(options_.timeout);
  client.set_read_timeout(options_.timeout);
  client.set_write_timeout(options_.timeout);
  httplib::Headers headers;
  if (!options_.api_key.empty()) headers.emplace("Authorization", "Bearer " + options_.api_key);

  const auto started = std::chrono::steady_clock::now();
  auto result = client.Post(url_.path + "/chat/completions", headers, build_body(request).dump(), "application/json");
  const auto elapsed = std::chrono::duration_cast<Millis>(std::chrono::steady_clock::now() - started);

  if (!result) {
    const auto err = result.error();
    const auto kind = (err == httplib::Error::Read || err == httplib::Error::ConnectionTimeout)
                          ? GatewayErrorKind::Timeout
                          : GatewayErrorKind::Transport;
    throw GatewayError(kind, httplib::to_string(err));
  }
  if (result->status != 200) {
    const auto kind = (result->status == 429 || result->status >= 500) ? GatewayErrorKind::Transport
                                                                        : GatewayErrorKind::Protocol;
    throw GatewayError(kind, "HTTP " + std::to_string(result->status));
  }
  ChatResponse response = parse_reply(result->body);
  response.latency = elapsed;
  return response;
}

}  // namespace agentic
