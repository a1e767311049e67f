#include "docpipe/unicode.hpp"

namespace docpipe::uni {

std::u32string to_u32(std::string_view utf8) {
    std::u32string out;
    out.reserve(utf8.size());
    const auto* p = reinterpret_cast<const unsigned char*>(utf8.data());
    const auto* end = p + utf8.size();
    while (p < end) {
        char32_t cp = 0;
        unsigned char c = *p++;
        if (c < 0x80) {
            cp = c;
        } else if ((c >> 5) == 0x6 && p < end) {
            cp = static_cast<char32_t>(c & 0x1F) << 6;
            cp |= (*p++ & 0x3F);
        } else if ((c >> 4) == 0xE && p + 1 < end) {
            cp = static_cast<char32_t>(c & 0x0F) << 12;
            cp |= static_cast<char32_t>(p[0] & 0x3F) << 6;
            cp |= (p[1] & 0x3F);
            p += 2;
        } else if ((c >> 3) == 0x1E && p + 2 < end) {
            cp = static_cast<char32_t>(c & 0x07) << 18;
            cp |= static_cast<char32_t>(p[0] & 0x3F) << 12;
            cp |= static_cast<char32_t>(p[1] & 0x3F) << 6;
            cp |= (p[2] & 0x3F);
            p += 3;
        } else {
            cp = 0xFFFD; // invalid byte sequence
        }
        out.push_back(cp);
    }
    return out;
}

std::string to_utf8(std::u32string_view s) {
    std::string out;
    out.reserve(s.size() * 3);
    for (char32_t ch : s) {
        auto c = static_cast<std::uint32_t>(ch);
        if (c < 0x80) {
            out.push_back(static_cast<char>(c));
        } else if (c < 0x800) {
            out.push_back(static_cast<char>(0xC0 | (c >> 6)));
            out.push_back(static_cast<char>(0x80 | (c & 0x3F)));
        } else if (c < 0x10000) {
            out.push_back(static_cast<char>(0xE0 | (c >> 12)));
            out.push_back(static_cast<char>(0x80 | ((c >> 6) & 0x3F)));
            out.push_back(static_cast<char>(0x80 | (c & 0x3F)));
        } else {
            out.push_back(static_cast<char>(0xF0 | (c >> 18)));
            out.push_back(static_cast<char>(0x80 | ((c >> 12) & 0x3F)));
            out.push_back(static_cast<char>(0x80 | ((c >> 6) & 0x3F)));
            out.push_back(static_cast<char>(0x80 | (c & 0x3F)));
        }
    }
    return out;
}

std::string to_utf8(char32_t cp) {
    return to_utf8(std::u32string_view(&cp, 1));
}

std::size_t length(std::string_view utf8) {
    std::size_t n = 0;
    for (unsigned char c : utf8) {
        if ((c & 0xC0) != 0x80) ++n; // count non-continuation bytes
    }
    return n;
}

bool is_cjk(char32_t cp) {
    auto c = static_cast<std::uint32_t>(cp);
    return (c >= 0x3400 && c <= 0x4DBF)    // CJK Extension A
        || (c >= 0x4E00 && c <= 0x9FFF)    // CJK Unified Ideographs
        || (c >= 0xF900 && c <= 0xFAFF)    // CJK Compatibility Ideographs
        || (c >= 0x3040 && c <= 0x30FF)    // Hiragana + Katakana
        || (c >= 0x20000 && c <= 0x2A6DF); // CJK Extension B
}

bool is_latin_letter(char32_t cp) {
    return (cp >= U'A' && cp <= U'Z') || (cp >= U'a' && cp <= U'z') ||
           (cp >= 0x00C0 && cp <= 0x024F); // Latin-1 supplement + extended
}

bool is_lower_latin(char32_t cp) {
    return (cp >= U'a' && cp <= U'z') || (cp >= 0x00DF && cp <= 0x00FF) ||
           (cp >= 0x0100 && cp <= 0x024F && (cp & 1u)); // extended ranges alternate case
}

bool is_ascii_digit(char32_t cp) {
    return cp >= U'0' && cp <= U'9';
}

bool is_space(char32_t cp) {
    switch (cp) {
    case U' ':
    case U'\t':
    case U'\n':
    case U'\r':
    case U'\f':
    case U'\v':
    case 0x00A0:
    case 0x3000:
        return true;
    default:
        return cp >= 0x2000 && cp <= 0x200A;
    }
}

bool is_terminal_punct(char32_t cp) {
    return cp == U'.' || cp == U'!' || cp == U'?' || cp == 0x3002 /* 。 */ ||
           cp == 0xFF01 /* ！ */ || cp == 0xFF1F /* ？ */;
}

} // namespace docpipe::uni
