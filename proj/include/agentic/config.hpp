#pragma once

#include <filesystem>
#include <functional>
#include <memory>
#include <optional>
#include <string>

#include "agentic/core_types.hpp"
#include "agentic/model_gateway.hpp"

namespace agentic {

/// Applies "scripted:<path>" or "http:<url>" (the URL keeps its own scheme,
/// e.g. "http:http://127.0.0.1:8000/v1"). Throws ValidationError.
void apply_backend_spec(RunConfig& config, std::string_view spec);

/// "on"/"off" and the usual boolean spellings. Throws ValidationError.
bool parse_switch(std::string_view value, std::string_view what);

/// Reads a JSON config file and overlays it on `base`. Relative paths inside
/// the file (backend.script_path, search.fixture_dir, assets_dir) are resolved
/// against the file's directory.
RunConfig load_config_file(const std::filesystem::path& path, RunConfig base = {});

using EnvLookup = std::function<std::optional<std::string>(const std::string&)>;

EnvLookup process_env();

/// Environment layer. Recognised variables:
///   AGENTIC_BACKEND, AGENTIC_MODEL, AGENTIC_TOOLS, AGENTIC_THINKING,
///   AGENTIC_MAX_TOOL_CALLS, AGENTIC_SEED, AGENTIC_SEARCH_FIXTURES,
///   AGENTIC_SEARCH_ENDPOINT, AGENTIC_INTERPRETER
RunConfig apply_env(RunConfig config, const EnvLookup& env);

/// Command-line layer; unset members leave the config alone.
struct ConfigOverrides {
  std::optional<std::string> backend;
  std::optional<bool> tools_enabled;
  std::optional<ThinkingPolicy> thinking;
  std::optional<int> max_tool_calls;
  std::optional<bool> keep_sandbox;
  std::optional<std::int64_t> seed;
};

RunConfig apply_overrides(RunConfig config, const ConfigOverrides& overrides);

/// A scripted backend path that is a directory may bundle `config.json`,
/// `dataset.jsonl` and `search/` next to `script.json`.
struct FixtureBundle {
  std::optional<std::filesystem::path> config;
  std::optional<std::filesystem::path> dataset;
  std::optional<std::filesystem::path> search_dir;
};

FixtureBundle find_fixture_bundle(std::string_view backend_spec);

std::unique_ptr<ChatBackend> make_backend(const RunConfig& config, const EnvLookup& env);
GatewayOptions gateway_options(const RunConfig& config);

}  // namespace agentic
