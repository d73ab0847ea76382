#pragma once

#include <filesystem>
#include <map>
#include <span>
#include <stdexcept>
#include <string>
#include <unordered_set>

#include "agentic/core_types.hpp"

namespace agentic {

class MissingPromptAsset : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Prompt templates loaded from `<assets>/prompts/*.txt`. Placeholders are
/// written `{{NAME}}`.
class PromptBook {
 public:
  /// Loads every required asset; throws MissingPromptAsset naming the first
  /// absent file.
  static PromptBook load(const std::filesystem::path& prompts_dir);
  static PromptBook load_default();

  const std::string& asset(const std::string& name) const;
  const std::string& version() const { return version_; }

  std::string system_prompt(AgentRole role, bool tools_enabled) const;
  /// Re-prompt text after a malformed planner reply.
  std::string format_reminder(std::string_view reason, bool final_attempt, bool tools_enabled) const;

  /// Fills `{{KEY}}` placeholders of `asset(name)`.
  std::string render(const std::string& name, const std::map<std::string, std::string>& values) const;

 private:
  std::map<std::string, std::string, std::less<>> assets_;
  std::string version_;
};

struct RolePrompt {
  std::string system;
  std::string user;

  std::string text() const { return system + "\n\n" + user; }
};

/// Deterministic in (role, task, history, tools_enabled). For the planner the
/// user part carries the question and one observation block per prior tool
/// call, in call order. Tool roles get only their system prompt here; each
/// agent supplies its own user message.
RolePrompt build_role_prompt(const PromptBook& book, AgentRole role, const Task& task,
                             std::span<const ToolCallRecord> history, bool tools_enabled);

std::filesystem::path default_assets_dir();
std::filesystem::path resolve_assets_dir(const std::string& configured);

std::unordered_set<std::string> load_stop_words(const std::filesystem::path& path);

}  // namespace agentic
