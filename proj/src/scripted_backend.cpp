#include "agentic/scripted_backend.hpp"

#include <thread>

#include "agentic/text_util.hpp"
#include "agentic/trace_io.hpp"

namespace agentic {

namespace {

int word_count(std::string_view s) {
  int n = 0;
  bool in_word = false;
  for (char c : s) {
    const bool space = c == ' ' || c == '\n' || c == '\t' || c == '\r';
    if (!space && !in_word) ++n;
    in_word = !space;
  }
  return n;
}

const ChatMessage* last_user_message(const ChatRequest& request) {
  for (auto it = request.messages.rbegin(); it != request.messages.rend(); ++it) {
    if (it->speaker == Speaker::User) return &*it;
  }
  return nullptr;
}

}  // namespace

ScriptedBackend::ScriptedBackend(std::vector<ScriptStep> steps, Millis per_call_timeout)
    : steps_(std::move(steps)), per_call_timeout_(per_call_timeout) {}

std::size_t ScriptedBackend::consumed() const {
  std::lock_guard lock(mutex_);
  return cursor_;
}

ChatResponse ScriptedBackend::execute(const ChatRequest& request) {
  if (request.messages.empty()) throw GatewayError(GatewayErrorKind::Precondition, "request has no messages");

  ScriptStep step;
  std::size_t index = 0;
  {
    std::lock_guard lock(mutex_);
    if (cursor_ >= steps_.size()) {
      throw GatewayError(GatewayErrorKind::ScriptExhausted,
                         "script has " + std::to_string(steps_.size()) + " steps; request " +
                             std::to_string(cursor_ + 1) + " has no reply");
    }
    index = cursor_++;
    step = steps_[index];
  }

  if (step.match) {
    const ChatMessage* user = last_user_message(request);
    if (user == nullptr || !text::contains(user->content, *step.match)) {
      throw GatewayError(GatewayErrorKind::MatchFailure, "step " + std::to_string(index + 1) + " expects \"" +
                                                             *step.match + "\" in the last user message");
    }
  }

  if (step.latency.count() > 0) {
    if (per_call_timeout_.count() > 0 && step.latency > per_call_timeout_) {
      std::this_thread::sleep_for(per_call_timeout_);
      throw GatewayError(GatewayErrorKind::Timeout, "scripted latency exceeds per-call timeout");
    }
    std::this_thread::sleep_for(step.latency);
  }
  if (step.fail) throw GatewayError(*step.fail, "scripted failure at step " + std::to_string(index + 1));

  ChatResponse response;
  response.content = step.response;
  if (request.thinking_enabled && step.thinking) response.thinking_segment = step.thinking;
  int prompt_words = word_count(request.system_prompt);
  for (const auto& m : request.messages) prompt_words += word_count(m.content);
  response.token_usage = {prompt_words, word_count(step.response)};
  response.latency = step.latency;
  return response;
}

std::vector<ScriptStep> parse_script(std::string_view text) {
  Json doc = Json::parse(text, nullptr, false);
  if (doc.is_discarded()) throw GatewayError(GatewayErrorKind::ParseError, "script is not valid JSON");
  const Json* steps = &doc;
  if (doc.is_object()) {
    auto it = doc.find("steps");
    if (it == doc.end()) throw GatewayError(GatewayErrorKind::ParseError, "script object lacks \"steps\"");
    steps = &*it;
  }
  if (!steps->is_array()) throw GatewayError(GatewayErrorKind::ParseError, "script steps must be an array");

  std::vector<ScriptStep> out;
  std::size_t n = 0;
  for (const auto& s : *steps) {
    ++n;
    const std::string where = "step " + std::to_string(n) + ": ";
    if (!s.is_object()) throw GatewayError(GatewayErrorKind::ParseError, where + "expected an object");
    ScriptStep step;
    for (const auto& [key, v] : s.items()) {
      if (key == "match") {
        if (!v.is_string()) throw GatewayError(GatewayErrorKind::ParseError, where + "match must be a string");
        step.match = v.get<std::string>();
      } else if (key == "response") {
        if (!v.is_string()) throw GatewayError(GatewayErrorKind::ParseError, where + "response must be a string");
        step.response = v.get<std::string>();
      } else if (key == "thinking") {
        if (!v.is_string()) throw GatewayError(GatewayErrorKind::ParseError, where + "thinking must be a string");
        step.thinking = v.get<std::string>();
      } else if (key == "latency_ms") {
        if (!v.is_number_integer() || v.get<std::int64_t>() < 0) {
          throw GatewayError(GatewayErrorKind::ParseError, where + "latency_ms must be a non-negative integer");
        }
        step.latency = Millis{v.get<std::int64_t>()};
      } else if (key == "fail") {
        auto kind = v.is_string() ? gateway_error_from_name(v.get<std::string>()) : std::nullopt;
        if (!kind) throw GatewayError(GatewayErrorKind::ParseError, where + "fail must name a gateway error");
        step.fail = kind;
      } else if (key == "comment") {
        // free-form annotation for fixture authors
      } else {
        throw GatewayError(GatewayErrorKind::ParseError, where + "unknown key '" + key + "'");
      }
    }
    if (!s.contains("response") && !step.fail) {
      throw GatewayError(GatewayErrorKind::ParseError, where + "missing response");
    }
    out.push_back(std::move(step));
  }
  return out;
}

std::unique_ptr<ScriptedBackend> load_script(const std::filesystem::path& path, Millis per_call_timeout) {
  std::filesystem::path file = path;
  if (std::filesystem::is_directory(file)) file /= "script.json";
  std::string text;
  try {
    text = read_text_file(file);
  } catch (const std::exception& e) {
    throw GatewayError(GatewayErrorKind::ParseError, e.what());
  }
  try {
    return std::make_unique<ScriptedBackend>(parse_script(text), per_call_timeout);
  } catch (const GatewayError& e) {
    throw GatewayError(GatewayErrorKind::ParseError, file.string() + ": " + e.what());
  }
}

}  // namespace agentic
