#pragma once

#include <cstdint>
#include <string_view>

namespace ehn::unicode {

/// Decodes one UTF-8 sequence starting at `pos`, advancing it.
/// Malformed bytes decode to U+FFFD and advance by one.
char32_t next_codepoint(std::string_view s, std::size_t& pos);

/// Letter of the Latin script (ASCII, accented, fullwidth, ...).
bool is_latin_letter(char32_t cp);

bool has_latin_letter(std::string_view s);
bool all_latin_letters(std::string_view s);
bool is_ascii(std::string_view s);

}  // namespace ehn::unicode
