#include "ehn/unicode.hpp"

#include <unicode/uchar.h>
#include <unicode/uscript.h>

namespace ehn::unicode {

char32_t next_codepoint(std::string_view s, std::size_t& pos) {
    const auto byte = [&](std::size_t i) { return static_cast<unsigned char>(s[i]); };
    const unsigned char lead = byte(pos);
    int extra = 0;
    char32_t cp = 0;
    if (lead < 0x80) {
        ++pos;
        return lead;
    } else if ((lead & 0xE0) == 0xC0) {
        extra = 1;
        cp = lead & 0x1F;
    } else if ((lead & 0xF0) == 0xE0) {
        extra = 2;
        cp = lead & 0x0F;
    } else if ((lead & 0xF8) == 0xF0) {
        extra = 3;
        cp = lead & 0x07;
    } else {
        ++pos;
        return 0xFFFD;
    }
    if (pos + extra >= s.size()) {
        ++pos;
        return 0xFFFD;
    }
    for (int i = 1; i <= extra; ++i) {
        const unsigned char c = byte(pos + i);
        if ((c & 0xC0) != 0x80) {
            ++pos;
            return 0xFFFD;
        }
        cp = (cp << 6) | (c & 0x3F);
    }
    pos += extra + 1;
    return cp;
}

bool is_latin_letter(char32_t cp) {
    UErrorCode err = U_ZERO_ERROR;
    const auto c = static_cast<UChar32>(cp);
    return u_isalpha(c) && uscript_getScript(c, &err) == USCRIPT_LATIN && U_SUCCESS(err);
}

bool has_latin_letter(std::string_view s) {
    for (std::size_t pos = 0; pos < s.size();) {
        if (is_latin_letter(next_codepoint(s, pos))) return true;
    }
    return false;
}

bool all_latin_letters(std::string_view s) {
    if (s.empty()) return false;
    for (std::size_t pos = 0; pos < s.size();) {
        if (!is_latin_letter(next_codepoint(s, pos))) return false;
    }
    return true;
}

bool is_ascii(std::string_view s) {
    for (unsigned char c : s) {
        if (c >= 0x80) return false;
    }
    return true;
}

}  // namespace ehn::unicode
