#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace teamtrace::text {

std::string to_lower(std::string_view s);
std::string trim(std::string_view s);

// Splits on `sep`, trimming each piece and dropping empty pieces.
std::vector<std::string> split_list(std::string_view s, char sep);

// Lowercases and splits into word tokens. Letters, digits, '-' and '\'' stay
// inside words; ',', '.', ';', ':', '!' and '?' become single-char tokens.
std::vector<std::string> tokenize(std::string_view s);

// True when `phrase` occurs in `haystack` on word boundaries (both lowercased).
bool contains_phrase(std::string_view haystack, std::string_view phrase);

}  // namespace teamtrace::text
