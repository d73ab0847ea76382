#include "agentic/config.hpp"

#include <charconv>
#include <cstdlib>

#include "agentic/http_backend.hpp"
#include "agentic/scripted_backend.hpp"
#include "agentic/text_util.hpp"
#include "agentic/trace_io.hpp"

namespace agentic {

namespace {

std::string resolve_against(const std::filesystem::path& base, const std::string& p) {
  if (p.empty() || std::filesystem::path(p).is_absolute()) return p;
  return (base / p).lexically_normal().string();
}

template <typename Int>
Int parse_int(std::string_view s, std::string_view what) {
  Int value{};
  const auto t = text::trim(s);
  auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), value);
  if (ec != std::errc() || ptr != t.data() + t.size()) {
    throw ValidationError(std::string(what) + ": expected an integer, got '" + std::string(s) + "'");
  }
  return value;
}

}  // namespace

void apply_backend_spec(RunConfig& config, std::string_view spec) {
  const auto colon = spec.find(':');
  if (colon == std::string_view::npos) {
    throw ValidationError("backend: expected scripted:<path> or http:<url>, got '" + std::string(spec) + "'");
  }
  const auto kind = spec.substr(0, colon);
  const auto rest = std::string(spec.substr(colon + 1));
  if (rest.empty()) throw ValidationError("backend: missing target after '" + std::string(kind) + ":'");
  if (kind == "scripted") {
    config.backend.kind = BackendConfig::Kind::Scripted;
    config.backend.script_path = rest;
  } else if (kind == "http" || kind == "https") {
    config.backend.kind = BackendConfig::Kind::Http;
    // Accept both "http:http://host/v1" and the shorthand "http://host/v1".
    config.backend.url = rest.starts_with("//") ? std::string(spec) : rest;
  } else {
    throw ValidationError("backend: unknown kind '" + std::string(kind) + "'");
  }
}

bool parse_switch(std::string_view value, std::string_view what) {
  const auto v = text::to_lower_ascii(text::trim(value));
  if (v == "on" || v == "true" || v == "1" || v == "yes") return true;
  if (v == "off" || v == "false" || v == "0" || v == "no") return false;
  throw ValidationError(std::string(what) + ": expected on|off, got '" + std::string(value) + "'");
}

RunConfig load_config_file(const std::filesystem::path& path, RunConfig base) {
  if (!std::filesystem::is_regular_file(path)) throw ValidationError("config file not found: " + path.string());
  auto doc = Json::parse(read_text_file(path), nullptr, false);
  if (doc.is_discarded()) throw ValidationError("config file is not valid JSON: " + path.string());
  const auto dir = path.parent_path();
  // Only paths the file itself sets are resolved against its directory.
  const auto previous = base;
  auto config = overlay_run_config(std::move(base), doc);
  if (config.backend.script_path != previous.backend.script_path) {
    config.backend.script_path = resolve_against(dir, config.backend.script_path);
  }
  if (config.search.fixture_dir != previous.search.fixture_dir) {
    config.search.fixture_dir = resolve_against(dir, config.search.fixture_dir);
  }
  if (config.assets_dir != previous.assets_dir) config.assets_dir = resolve_against(dir, config.assets_dir);
  return config;
}

EnvLookup process_env() {
  return [](const std::string& name) -> std::optional<std::string> {
    const char* v = std::getenv(name.c_str());
    if (v == nullptr || *v == '\0') return std::nullopt;
    return std::string(v);
  };
}

RunConfig apply_env(RunConfig config, const EnvLookup& env) {
  if (auto v = env("AGENTIC_BACKEND")) apply_backend_spec(config, *v);
  if (auto v = env("AGENTIC_MODEL")) config.backend.model = *v;
  if (auto v = env("AGENTIC_TOOLS")) config.tools_enabled = parse_switch(*v, "AGENTIC_TOOLS");
  if (auto v = env("AGENTIC_THINKING")) {
    auto p = policy_from_name(*v);
    if (!p) throw ValidationError("AGENTIC_THINKING: expected none|planner|full");
    config.thinking = *p;
  }
  if (auto v = env("AGENTIC_MAX_TOOL_CALLS")) config.max_tool_calls = parse_int<int>(*v, "AGENTIC_MAX_TOOL_CALLS");
  if (auto v = env("AGENTIC_SEED")) config.seed = parse_int<std::int64_t>(*v, "AGENTIC_SEED");
  if (auto v = env("AGENTIC_SEARCH_FIXTURES")) {
    config.search.kind = SearchConfig::Kind::Fixture;
    config.search.fixture_dir = *v;
  }
  if (auto v = env("AGENTIC_SEARCH_ENDPOINT")) {
    config.search.kind = SearchConfig::Kind::Live;
    config.search.endpoint = *v;
  }
  if (auto v = env("AGENTIC_INTERPRETER")) config.sandbox.interpreter_cmd = {*v};
  return config;
}

RunConfig apply_overrides(RunConfig config, const ConfigOverrides& o) {
  if (o.backend) apply_backend_spec(config, *o.backend);
  if (o.tools_enabled) config.tools_enabled = *o.tools_enabled;
  if (o.thinking) config.thinking = *o.thinking;
  if (o.max_tool_calls) config.max_tool_calls = *o.max_tool_calls;
  if (o.keep_sandbox) config.sandbox.keep_sandbox = *o.keep_sandbox;
  if (o.seed) config.seed = *o.seed;
  return config;
}

FixtureBundle find_fixture_bundle(std::string_view backend_spec) {
  FixtureBundle bundle;
  constexpr std::string_view prefix = "scripted:";
  if (!backend_spec.starts_with(prefix)) return bundle;
  const std::filesystem::path dir(backend_spec.substr(prefix.size()));
  if (!std::filesystem::is_directory(dir)) return bundle;
  if (std::filesystem::is_regular_file(dir / "config.json")) bundle.config = dir / "config.json";
  if (std::filesystem::is_regular_file(dir / "dataset.jsonl")) bundle.dataset = dir / "dataset.jsonl";
  if (std::filesystem::is_directory(dir / "search")) bundle.search_dir = dir / "search";
  return bundle;
}

std::unique_ptr<ChatBackend> make_backend(const RunConfig& config, const EnvLookup& env) {
  if (config.backend.kind == BackendConfig::Kind::Scripted) {
    if (config.backend.script_path.empty()) throw ValidationError("backend.script_path is required for scripted runs");
    return load_script(config.backend.script_path, config.per_call_timeout);
  }
  HttpBackendOptions options;
  options.url = config.backend.url;
  options.model = config.backend.model;
  if (auto key = env(config.backend.api_key_env)) options.api_key = *key;
  options.thinking_control = config.backend.thinking_control;
  options.timeout = config.per_call_timeout;
  try {
    return std::make_unique<HttpChatBackend>(std::move(options));
  } catch (const std::invalid_argument& e) {
    throw ValidationError(std::string("backend.url: ") + e.what());
  }
}

GatewayOptions gateway_options(const RunConfig& config) {
  GatewayOptions options;
  options.retries = config.retries_per_tool;
  options.no_think_suffix = config.backend.no_think_suffix;
  return options;
}

}  // namespace agentic
