#include "agentic/prompts.hpp"

#include <cstdlib>

#include "agentic/text_util.hpp"
#include "agentic/trace_io.hpp"

namespace agentic {

namespace {

constexpr const char* kRequiredAssets[] = {
    "planner",          "planner_tools",    "contract_tools", "contract_answer",  "reminder",
    "reminder_final",   "web_search",       "coder",          "mind_map",         "search_decompose",
    "search_synthesize", "coder_generate",  "coder_repair",   "mindmap_extract",
};

std::string strip_trailing_newlines(std::string s) {
  while (!s.empty() && (s.back() == '\n' || s.back() == '\r')) s.pop_back();
  return s;
}

std::string_view system_asset_for(AgentRole role) {
  switch (role) {
    case AgentRole::Planner:
      return "planner";
    case AgentRole::WebSearch:
      return "web_search";
    case AgentRole::Coder:
      return "coder";
    case AgentRole::MindMap:
      return "mind_map";
  }
  return "planner";
}

}  // namespace

PromptBook PromptBook::load(const std::filesystem::path& prompts_dir) {
  PromptBook book;
  for (const char* name : kRequiredAssets) {
    const auto path = prompts_dir / (std::string(name) + ".txt");
    if (!std::filesystem::is_regular_file(path)) throw MissingPromptAsset("missing prompt asset: " + path.string());
    book.assets_.emplace(name, strip_trailing_newlines(read_text_file(path)));
  }
  const auto version_path = prompts_dir / "VERSION";
  if (!std::filesystem::is_regular_file(version_path)) {
    throw MissingPromptAsset("missing prompt asset: " + version_path.string());
  }
  book.version_ = std::string(text::trim(read_text_file(version_path)));
  return book;
}

PromptBook PromptBook::load_default() { return load(default_assets_dir() / "prompts"); }

const std::string& PromptBook::asset(const std::string& name) const {
  auto it = assets_.find(name);
  if (it == assets_.end()) throw MissingPromptAsset("unknown prompt asset: " + name);
  return it->second;
}

std::string PromptBook::render(const std::string& name, const std::map<std::string, std::string>& values) const {
  std::string out = asset(name);
  for (const auto& [key, value] : values) {
    const std::string token = "{{" + key + "}}";
    for (auto pos = out.find(token); pos != std::string::npos; pos = out.find(token, pos + value.size())) {
      out.replace(pos, token.size(), value);
    }
  }
  return out;
}

std::string PromptBook::system_prompt(AgentRole role, bool tools_enabled) const {
  if (role != AgentRole::Planner) return asset(std::string(system_asset_for(role)));
  return render("planner", {
                               {"TOOLS", tools_enabled ? "\n" + asset("planner_tools") + "\n" : ""},
                               {"CONTRACT", asset(tools_enabled ? "contract_tools" : "contract_answer")},
                           });
}

std::string PromptBook::format_reminder(std::string_view reason, bool final_attempt, bool tools_enabled) const {
  return render(final_attempt ? "reminder_final" : "reminder",
                {
                    {"REASON", std::string(reason)},
                    {"CONTRACT", asset(tools_enabled ? "contract_tools" : "contract_answer")},
                });
}

RolePrompt build_role_prompt(const PromptBook& book, AgentRole role, const Task& task,
                             std::span<const ToolCallRecord> history, bool tools_enabled) {
  RolePrompt prompt;
  prompt.system = book.system_prompt(role, tools_enabled);
  if (role != AgentRole::Planner) return prompt;

  std::string user = "Question:\n" + task.question + "\n";
  if (!task.attachments.empty()) {
    user += "\nAttached files:\n";
    for (const auto& path : task.attachments) user += "- " + path + "\n";
  }
  if (tools_enabled) {
    if (history.empty()) {
      user += "\nNo tool calls yet.\n";
    } else {
      user += "\nTool calls so far:\n";
      for (const auto& rec : history) {
        const auto n = std::to_string(rec.index);
        user += "\n[Tool call " + n + "] " + std::string(role_name(rec.tool)) + "\n";
        user += "Arguments: " + rec.arguments + "\n";
        user += "Observation:\n" + rec.observation + "\n";
        user += "[End of observation " + n + "]\n";
      }
    }
  }
  prompt.user = std::move(user);
  return prompt;
}

std::filesystem::path default_assets_dir() {
  if (const char* env = std::getenv("AGENTIC_ASSETS_DIR"); env != nullptr && *env != '\0') return env;
  return AGENTIC_DEFAULT_ASSETS_DIR;
}

std::filesystem::path resolve_assets_dir(const std::string& configured) {
  return configured.empty() ? default_assets_dir() : std::filesystem::path(configured);
}

std::unordered_set<std::string> load_stop_words(const std::filesystem::path& path) {
  std::unordered_set<std::string> words;
  for (auto line : text::split_lines(read_text_file(path))) {
    auto w = text::trim(line);
    if (w.empty() || w.front() == '#') continue;
    words.insert(text::to_lower_ascii(w));
  }
  return words;
}

}  // namespace agentic
