#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace evoforge::text {

std::string_view trim(std::string_view s);
std::string to_lower_ascii(std::string_view s);

/// Number of UTF-8 code points; invalid bytes count as one each.
std::size_t utf8_length(std::string_view s);

/// Lowercase, whitespace runs collapsed to one space, trimmed.
std::string normalize_body(std::string_view s);

std::vector<std::string_view> split_lines(std::string_view s);

/// Cut `text` so it has at most `max_chars` code points, preferring the last
/// sentence end, then the last word boundary.
std::string truncate_at_sentence(std::string_view text, std::size_t max_chars);

std::uint64_t fnv1a64(std::string_view data, std::uint64_t seed = 14695981039346656037ull);

std::string hex_u64(std::uint64_t value);

/// Lowercase hex SHA-256.
std::string sha256_hex(std::string_view data);

}  // namespace evoforge::text
