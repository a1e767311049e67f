#pragma once

#include <cstdint>
#include <string>
#include <string_view>

// Minimal UTF-8 <-> UTF-32 helpers plus the character classes the pipeline
// cares about. All length accounting in the library (chunk caps, title
// limits) is in Unicode scalar values, never bytes.
namespace docpipe::uni {

std::u32string to_u32(std::string_view utf8);
std::string to_utf8(std::u32string_view s);
std::string to_utf8(char32_t cp);

// Number of Unicode scalar values in a UTF-8 string.
std::size_t length(std::string_view utf8);

bool is_cjk(char32_t cp);
bool is_latin_letter(char32_t cp);
bool is_lower_latin(char32_t cp);
bool is_ascii_digit(char32_t cp);

// Space-like characters (includes U+3000 ideographic space).
bool is_space(char32_t cp);

// Sentence-final punctuation: . 。 ! ? ！ ？
bool is_terminal_punct(char32_t cp);

} // namespace docpipe::uni
