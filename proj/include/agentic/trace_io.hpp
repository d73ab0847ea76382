#pragma once

#include <filesystem>
#include <stdexcept>
#include <string>

#include <json.hpp>

#include "agentic/core_types.hpp"

namespace agentic {

using Json = nlohmann::ordered_json;

class TraceFormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

Json to_json(const RunConfig& config);
/// Overlays the keys present in `json` onto `base`. Unknown keys and
/// wrongly typed values throw ValidationError naming the key path.
RunConfig overlay_run_config(RunConfig base, const Json& json);
inline RunConfig run_config_from_json(const Json& json) { return overlay_run_config(RunConfig{}, json); }

Json to_json(const ToolCallRecord& record);
Json to_json(const Turn& turn);
Json to_json(const Trace& trace);
Trace trace_from_json(const Json& json);

std::string serialize_trace(const Trace& trace);
Trace parse_trace(std::string_view text);

/// `trace_<task_id>.json`, with characters outside [A-Za-z0-9._-] replaced.
std::string trace_file_name(std::string_view task_id);
void write_trace_file(const std::filesystem::path& dir, const Trace& trace);
/// Throws TraceFormatError whose message starts with the file path.
Trace read_trace_file(const std::filesystem::path& path);

std::string read_text_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, std::string_view content);

}  // namespace agentic
