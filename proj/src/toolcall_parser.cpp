#include "agentic/toolcall_parser.hpp"

#include <json.hpp>

#include <optional>

#include "agentic/text_util.hpp"

namespace agentic {

namespace {

constexpr std::string_view kThinkOpen = "<think>";
constexpr std::string_view kThinkClose = "</think>";

struct BlockScan {
  std::optional<ToolInvocation> invocation;
  std::optional<std::string> first_problem;
  std::string outside;  // text with block regions blanked out
};

// Validates one block body; returns the invocation or a reason.
std::variant<ToolInvocation, std::string> parse_block_body(std::string_view body) {
  auto doc = nlohmann::json::parse(text::trim(body), nullptr, false);
  if (doc.is_discarded()) return std::string("tool_call block is not valid JSON");
  if (!doc.is_object()) return std::string("tool_call block must be a JSON object");
  if (doc.size() != 2 || !doc.contains("name") || !doc.contains("arguments")) {
    return std::string("tool_call block must have exactly \"name\" and \"arguments\"");
  }
  const auto& name = doc["name"];
  if (!name.is_string()) return std::string("tool name must be a string");
  auto role = role_from_name(name.get<std::string>());
  if (!role || *role == AgentRole::Planner) return "unknown tool \"" + name.get<std::string>() + "\"";
  const auto& args = doc["arguments"];
  if (!args.is_object() || args.size() != 1) return std::string("arguments must hold exactly one of query/task");
  const auto entry = args.begin();
  const std::string& key = entry.key();
  const auto& value = entry.value();
  if (key != "query" && key != "task") return "unknown argument \"" + key + "\"";
  if (!value.is_string()) return std::string("argument value must be a string");
  auto trimmed = text::trim(value.get_ref<const std::string&>());
  if (trimmed.empty()) return std::string("empty tool arguments");
  return ToolInvocation{*role, key, std::string(trimmed)};
}

BlockScan scan_blocks(const std::string& s) {
  BlockScan scan;
  scan.outside = s;
  std::size_t pos = 0;
  while (true) {
    const auto open = s.find(kToolCallOpen, pos);
    if (open == std::string::npos) break;
    const auto body_start = open + kToolCallOpen.size();
    const auto close = s.find(kToolCallClose, body_start);
    const auto region_end = close == std::string::npos ? s.size() : close + kToolCallClose.size();
    for (std::size_t i = open; i < region_end; ++i) {
      if (scan.outside[i] != '\n') scan.outside[i] = ' ';
    }
    if (close == std::string::npos) {
      if (!scan.first_problem) scan.first_problem = "unterminated tool_call block";
      break;
    }
    auto parsed = parse_block_body(std::string_view(s).substr(body_start, close - body_start));
    if (auto* inv = std::get_if<ToolInvocation>(&parsed)) {
      scan.invocation = std::move(*inv);
      return scan;
    }
    if (!scan.first_problem) scan.first_problem = std::get<std::string>(parsed);
    pos = region_end;
  }
  return scan;
}

}  // namespace

std::string strip_thinking(std::string_view input) {
  std::string s(input);
  // A closer before any opener: the opener lived in the chat template.
  const auto first_close = s.find(kThinkClose);
  const auto first_open = s.find(kThinkOpen);
  if (first_close != std::string::npos && (first_open == std::string::npos || first_close < first_open)) {
    s.erase(0, first_close + kThinkClose.size());
  }
  while (true) {
    const auto open = s.find(kThinkOpen);
    if (open == std::string::npos) break;
    const auto close = s.find(kThinkClose, open + kThinkOpen.size());
    if (close == std::string::npos) {
      s.erase(open);
      break;
    }
    s.erase(open, close + kThinkClose.size() - open);
  }
  return s;
}

PlannerDirective parse_directive(std::string_view raw_output) {
  const std::string s = strip_thinking(text::sanitize_utf8(raw_output));
  BlockScan scan = scan_blocks(s);
  if (scan.invocation) return std::move(*scan.invocation);

  std::optional<std::string> answer;
  bool saw_empty_answer = false;
  for (auto line : text::split_lines(scan.outside)) {
    auto t = text::trim(line);
    if (!t.starts_with(kFinalAnswerPrefix)) continue;
    auto value = text::trim(t.substr(kFinalAnswerPrefix.size()));
    if (value.empty()) {
      saw_empty_answer = true;
    } else {
      answer = std::string(value);
    }
  }
  if (answer) return FinalAnswer{std::move(*answer)};
  if (scan.first_problem) return Malformed{std::move(*scan.first_problem)};
  if (saw_empty_answer) return Malformed{"empty final answer"};
  return Malformed{"no tool call or final answer"};
}

std::string render_invocation(const ToolInvocation& invocation) {
  nlohmann::ordered_json body;
  body["name"] = role_name(invocation.tool);
  body["arguments"] = {{invocation.argument_key, invocation.arguments}};
  auto json = body.dump(-1, ' ', false, nlohmann::json::error_handler_t::replace);
  // "<\/" keeps a closing tag inside the arguments from ending the block.
  for (auto pos = json.find("</"); pos != std::string::npos; pos = json.find("</", pos + 3)) {
    json.replace(pos, 2, "<\\/");
  }
  return std::string(kToolCallOpen) + json + std::string(kToolCallClose);
}

}  // namespace agentic
