#include "agentic/trace_io.hpp"

#include <fstream>
#include <sstream>

namespace agentic {

namespace {

[[noreturn]] void bad_key(const std::string& path, const std::string& what) {
  throw ValidationError("config key '" + path + "': " + what);
}

std::string get_string(const Json& v, const std::string& path) {
  if (!v.is_string()) bad_key(path, "expected a string");
  return v.get<std::string>();
}

bool get_bool(const Json& v, const std::string& path) {
  if (!v.is_boolean()) bad_key(path, "expected a boolean");
  return v.get<bool>();
}

std::int64_t get_int(const Json& v, const std::string& path) {
  if (!v.is_number_integer()) bad_key(path, "expected an integer");
  return v.get<std::int64_t>();
}

std::uint64_t get_uint(const Json& v, const std::string& path) {
  if (!v.is_number_integer() || v.get<std::int64_t>() < 0) bad_key(path, "expected a non-negative integer");
  return v.get<std::uint64_t>();
}

double get_double(const Json& v, const std::string& path) {
  if (!v.is_number()) bad_key(path, "expected a number");
  return v.get<double>();
}

void require_object(const Json& v, const std::string& path) {
  if (!v.is_object()) bad_key(path, "expected an object");
}

std::string_view backend_kind_name(BackendConfig::Kind k) {
  return k == BackendConfig::Kind::Http ? "http" : "scripted";
}

std::string_view thinking_control_name(ThinkingControl c) {
  return c == ThinkingControl::PromptSuffix ? "prompt_suffix" : "template_flag";
}

std::string_view search_kind_name(SearchConfig::Kind k) {
  return k == SearchConfig::Kind::Live ? "live" : "fixture";
}

Json backend_json(const BackendConfig& b) {
  Json j;
  j["kind"] = backend_kind_name(b.kind);
  j["script_path"] = b.script_path;
  j["url"] = b.url;
  j["model"] = b.model;
  j["api_key_env"] = b.api_key_env;
  j["thinking_control"] = thinking_control_name(b.thinking_control);
  j["no_think_suffix"] = b.no_think_suffix;
  j["temperature"] = b.temperature;
  j["max_output_tokens"] = b.max_output_tokens;
  return j;
}

void overlay_backend(BackendConfig& b, const Json& j) {
  require_object(j, "backend");
  for (const auto& [key, v] : j.items()) {
    const std::string path = "backend." + key;
    if (key == "kind") {
      auto s = get_string(v, path);
      if (s == "http") b.kind = BackendConfig::Kind::Http;
      else if (s == "scripted") b.kind = BackendConfig::Kind::Scripted;
      else bad_key(path, "expected 'http' or 'scripted'");
    } else if (key == "script_path") {
      b.script_path = get_string(v, path);
    } else if (key == "url") {
      b.url = get_string(v, path);
    } else if (key == "model") {
      b.model = get_string(v, path);
    } else if (key == "api_key_env") {
      b.api_key_env = get_string(v, path);
    } else if (key == "thinking_control") {
      auto s = get_string(v, path);
      if (s == "template_flag") b.thinking_control = ThinkingControl::TemplateFlag;
      else if (s == "prompt_suffix") b.thinking_control = ThinkingControl::PromptSuffix;
      else bad_key(path, "expected 'template_flag' or 'prompt_suffix'");
    } else if (key == "no_think_suffix") {
      b.no_think_suffix = get_string(v, path);
    } else if (key == "temperature") {
      b.temperature = get_double(v, path);
    } else if (key == "max_output_tokens") {
      b.max_output_tokens = static_cast<int>(get_int(v, path));
    } else {
      bad_key(path, "unknown key");
    }
  }
}

Json search_json(const SearchConfig& s) {
  Json j;
  j["kind"] = search_kind_name(s.kind);
  j["fixture_dir"] = s.fixture_dir;
  j["endpoint"] = s.endpoint;
  j["api_key_env"] = s.api_key_env;
  j["auth_header"] = s.auth_header;
  j["top_k"] = s.top_k;
  j["max_subqueries"] = s.max_subqueries;
  return j;
}

void overlay_search(SearchConfig& s, const Json& j) {
  require_object(j, "search");
  for (const auto& [key, v] : j.items()) {
    const std::string path = "search." + key;
    if (key == "kind") {
      auto k = get_string(v, path);
      if (k == "fixture") s.kind = SearchConfig::Kind::Fixture;
      else if (k == "live") s.kind = SearchConfig::Kind::Live;
      else bad_key(path, "expected 'fixture' or 'live'");
    } else if (key == "fixture_dir") {
      s.fixture_dir = get_string(v, path);
    } else if (key == "endpoint") {
      s.endpoint = get_string(v, path);
    } else if (key == "api_key_env") {
      s.api_key_env = get_string(v, path);
    } else if (key == "auth_header") {
      s.auth_header = get_string(v, path);
    } else if (key == "top_k") {
      s.top_k = get_uint(v, path);
    } else if (key == "max_subqueries") {
      s.max_subqueries = get_uint(v, path);
    } else {
      bad_key(path, "unknown key");
    }
  }
}

Json sandbox_json(const SandboxConfig& s) {
  Json j;
  j["interpreter_cmd"] = s.interpreter_cmd;
  j["source_filename"] = s.source_filename;
  j["wall_time_ms"] = s.wall_time.count();
  j["memory_bytes"] = s.memory_bytes;
  j["stdout_byte_cap"] = s.stdout_byte_cap;
  j["network"] = "forbidden";
  j["keep_sandbox"] = s.keep_sandbox;
  return j;
}

void overlay_sandbox(SandboxConfig& s, const Json& j) {
  require_object(j, "sandbox");
  for (const auto& [key, v] : j.items()) {
    const std::string path = "sandbox." + key;
    if (key == "interpreter_cmd") {
      if (!v.is_array()) bad_key(path, "expected an array of strings");
      s.interpreter_cmd.clear();
      for (const auto& part : v) s.interpreter_cmd.push_back(get_string(part, path));
    } else if (key == "source_filename") {
      s.source_filename = get_string(v, path);
    } else if (key == "wall_time_ms") {
      s.wall_time = Millis{get_int(v, path)};
    } else if (key == "memory_bytes") {
      s.memory_bytes = get_uint(v, path);
    } else if (key == "stdout_byte_cap") {
      s.stdout_byte_cap = get_uint(v, path);
    } else if (key == "network") {
      if (get_string(v, path) != "forbidden") bad_key(path, "network access can only be 'forbidden'");
    } else if (key == "keep_sandbox") {
      s.keep_sandbox = get_bool(v, path);
    } else {
      bad_key(path, "unknown key");
    }
  }
}

const Json& field(const Json& j, const char* key) {
  auto it = j.find(key);
  if (it == j.end()) throw TraceFormatError(std::string("missing field '") + key + "'");
  return *it;
}

std::string str_field(const Json& j, const char* key) {
  const Json& v = field(j, key);
  if (!v.is_string()) throw TraceFormatError(std::string("field '") + key + "' must be a string");
  return v.get<std::string>();
}

std::optional<std::string> opt_str_field(const Json& j, const char* key) {
  auto it = j.find(key);
  if (it == j.end() || it->is_null()) return std::nullopt;
  if (!it->is_string()) throw TraceFormatError(std::string("field '") + key + "' must be a string or null");
  return it->get<std::string>();
}

std::int64_t int_field(const Json& j, const char* key) {
  const Json& v = field(j, key);
  if (!v.is_number_integer()) throw TraceFormatError(std::string("field '") + key + "' must be an integer");
  return v.get<std::int64_t>();
}

AgentRole role_field(const Json& j, const char* key) {
  auto name = str_field(j, key);
  auto role = role_from_name(name);
  if (!role) throw TraceFormatError("unknown role '" + name + "'");
  return *role;
}

Json optional_json(const std::optional<std::string>& v) { return v ? Json(*v) : Json(nullptr); }

}  // namespace

Json to_json(const RunConfig& c) {
  Json j;
  j["backend"] = backend_json(c.backend);
  j["tools_enabled"] = c.tools_enabled;
  j["thinking"] = policy_name(c.thinking);
  j["max_tool_calls"] = c.max_tool_calls;
  j["per_call_timeout_ms"] = c.per_call_timeout.count();
  j["sandbox"] = sandbox_json(c.sandbox);
  j["search"] = search_json(c.search);
  j["seed"] = c.seed;
  j["retries_per_tool"] = c.retries_per_tool;
  j["observation_byte_cap"] = c.observation_byte_cap;
  j["mindmap_top_m"] = c.mindmap_top_m;
  j["assets_dir"] = c.assets_dir;
  j["deterministic_timing"] = c.deterministic_timing;
  return j;
}

RunConfig overlay_run_config(RunConfig c, const Json& j) {
  require_object(j, "<root>");
  for (const auto& [key, v] : j.items()) {
    if (key == "backend") {
      overlay_backend(c.backend, v);
    } else if (key == "tools_enabled") {
      c.tools_enabled = get_bool(v, key);
    } else if (key == "thinking") {
      auto p = policy_from_name(get_string(v, key));
      if (!p) bad_key(key, "expected none|planner|full");
      c.thinking = *p;
    } else if (key == "max_tool_calls") {
      c.max_tool_calls = static_cast<int>(get_int(v, key));
    } else if (key == "per_call_timeout_ms") {
      c.per_call_timeout = Millis{get_int(v, key)};
    } else if (key == "sandbox") {
      overlay_sandbox(c.sandbox, v);
    } else if (key == "search") {
      overlay_search(c.search, v);
    } else if (key == "seed") {
      c.seed = get_int(v, key);
    } else if (key == "retries_per_tool") {
      c.retries_per_tool = static_cast<int>(get_int(v, key));
    } else if (key == "observation_byte_cap") {
      c.observation_byte_cap = get_uint(v, key);
    } else if (key == "mindmap_top_m") {
      c.mindmap_top_m = get_uint(v, key);
    } else if (key == "assets_dir") {
      c.assets_dir = get_string(v, key);
    } else if (key == "deterministic_timing") {
      c.deterministic_timing = get_bool(v, key);
    } else {
      bad_key(key, "unknown key");
    }
  }
  return c;
}

Json to_json(const ToolCallRecord& r) {
  Json j;
  j["index"] = r.index;
  j["tool"] = role_name(r.tool);
  j["arguments"] = r.arguments;
  j["observation"] = r.observation;
  j["wall_time_ms"] = r.wall_time.count();
  j["error"] = optional_json(r.error);
  return j;
}

Json to_json(const Turn& t) {
  Json j;
  j["role"] = role_name(t.role);
  j["prompt_digest"] = t.prompt_digest;
  j["raw_output"] = t.raw_output;
  j["thinking_segment"] = optional_json(t.thinking_segment);
  j["thinking_enabled"] = t.thinking_enabled;
  return j;
}

Json to_json(const Trace& t) {
  Json j;
  j["task_id"] = t.task_id;
  j["config_snapshot"] = to_json(t.config_snapshot);
  Json turns = Json::array();
  for (const auto& turn : t.turns) turns.push_back(to_json(turn));
  j["turns"] = std::move(turns);
  Json calls = Json::array();
  for (const auto& call : t.tool_calls) calls.push_back(to_json(call));
  j["tool_calls"] = std::move(calls);
  j["final_answer"] = t.final_answer;
  j["terminated_by"] = termination_name(t.terminated_by);
  j["predicted_answer"] = t.predicted_answer;
  j["malformed_outputs"] = t.malformed_outputs;
  j["backend_error"] = optional_json(t.backend_error);
  return j;
}

Trace trace_from_json(const Json& j) {
  if (!j.is_object()) throw TraceFormatError("trace document must be an object");
  Trace t;
  t.task_id = str_field(j, "task_id");
  try {
    t.config_snapshot = run_config_from_json(field(j, "config_snapshot"));
  } catch (const ValidationError& e) {
    throw TraceFormatError(std::string("config_snapshot: ") + e.what());
  }
  const Json& turns = field(j, "turns");
  if (!turns.is_array()) throw TraceFormatError("field 'turns' must be an array");
  for (const auto& tj : turns) {
    Turn turn;
    turn.role = role_field(tj, "role");
    turn.prompt_digest = str_field(tj, "prompt_digest");
    turn.raw_output = str_field(tj, "raw_output");
    turn.thinking_segment = opt_str_field(tj, "thinking_segment");
    const Json& te = field(tj, "thinking_enabled");
    if (!te.is_boolean()) throw TraceFormatError("field 'thinking_enabled' must be a boolean");
    turn.thinking_enabled = te.get<bool>();
    t.turns.push_back(std::move(turn));
  }
  const Json& calls = field(j, "tool_calls");
  if (!calls.is_array()) throw TraceFormatError("field 'tool_calls' must be an array");
  for (const auto& cj : calls) {
    ToolCallRecord rec;
    rec.index = static_cast<int>(int_field(cj, "index"));
    rec.tool = role_field(cj, "tool");
    rec.arguments = str_field(cj, "arguments");
    rec.observation = str_field(cj, "observation");
    rec.wall_time = Millis{int_field(cj, "wall_time_ms")};
    rec.error = opt_str_field(cj, "error");
    t.tool_calls.push_back(std::move(rec));
  }
  t.final_answer = str_field(j, "final_answer");
  auto term = termination_from_name(str_field(j, "terminated_by"));
  if (!term) throw TraceFormatError("unknown terminated_by value");
  t.terminated_by = *term;
  t.predicted_answer = str_field(j, "predicted_answer");
  t.malformed_outputs = static_cast<int>(int_field(j, "malformed_outputs"));
  t.backend_error = opt_str_field(j, "backend_error");
  return t;
}

std::string serialize_trace(const Trace& trace) { return to_json(trace).dump(2) + "\n"; }

Trace parse_trace(std::string_view text) {
  Json j = Json::parse(text, nullptr, false);
  if (j.is_discarded()) throw TraceFormatError("not valid JSON");
  return trace_from_json(j);
}

std::string trace_file_name(std::string_view task_id) {
  std::string name = "trace_";
  for (char c : task_id) {
    const bool ok = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') || c == '.' ||
                    c == '_' || c == '-';
    name += ok ? c : '_';
  }
  return name + ".json";
}

void write_trace_file(const std::filesystem::path& dir, const Trace& trace) {
  write_text_file(dir / trace_file_name(trace.task_id), serialize_trace(trace));
}

Trace read_trace_file(const std::filesystem::path& path) {
  try {
    return parse_trace(read_text_file(path));
  } catch (const std::exception& e) {
    throw TraceFormatError(path.string() + ": " + e.what());
  }
}

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text_file(const std::filesystem::path& path, std::string_view content) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out.write(content.data(), static_cast<std::streamsize>(content.size()));
}

}  // namespace agentic
