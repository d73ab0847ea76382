#pragma once

#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

namespace agentic::text {

std::string_view trim(std::string_view s);
std::string to_lower_ascii(std::string_view s);
std::vector<std::string_view> split_lines(std::string_view s);
std::string collapse_whitespace(std::string_view s);
bool contains(std::string_view haystack, std::string_view needle);

/// Replaces invalid UTF-8 sequences with U+FFFD.
std::string sanitize_utf8(std::string_view s);

/// Longest prefix of `s` of at most `max_bytes` that does not split a UTF-8
/// code point.
std::string_view utf8_prefix(std::string_view s, std::size_t max_bytes);

/// Lowercase hex SHA-256.
std::string sha256_hex(std::string_view data);

/// Case-folded alphanumeric runs, in order, with stop words removed.
std::vector<std::string> tokenize(std::string_view s, const std::unordered_set<std::string>& stop_words = {});

}  // namespace agentic::text
