#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

// UTF-8 and string helpers shared across modules.
namespace adt::text {

// Decodes UTF-8 into code points. Invalid bytes decode as U+FFFD.
std::u32string decode_utf8(std::string_view s);
std::string encode_utf8(std::u32string_view s);
bool is_valid_utf8(std::string_view s);
std::size_t count_code_points(std::string_view s);

// Lowercases ASCII and Latin-1/Latin Extended-A letters.
char32_t to_lower(char32_t c);
std::string to_lower_utf8(std::string_view s);

bool is_space(char32_t c);
bool is_punct(char32_t c);

std::string_view trim(std::string_view s);
std::vector<std::string_view> split(std::string_view s, char sep);
// Splits on runs of ASCII whitespace.
std::vector<std::string_view> split_ws(std::string_view s);
bool starts_with(std::string_view s, std::string_view prefix);

std::string sha256_hex(std::string_view data);
std::string base64_encode(std::string_view data);
std::string base64_decode(std::string_view data);

}  // namespace adt::text
