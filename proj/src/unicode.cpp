#include "emoscript/unicode.hpp"

#include <algorithm>
#include <array>
#include <iterator>

namespace emoscript::unicode {

namespace {

struct Range {
    char32_t lo;
    char32_t hi;
};

constexpr Range kExtPict[] = {
#include "ext_pict_table.inc"
};

bool is_continuation(unsigned char b) { return (b & 0xC0) == 0x80; }

bool is_tag(char32_t cp) { return cp >= 0xE0020 && cp <= 0xE007F; }

bool is_keycap_base(char32_t cp) {
    return (cp >= U'0' && cp <= U'9') || cp == U'#' || cp == U'*';
}

char32_t peek(std::string_view text, std::size_t pos, std::size_t& next) {
    next = pos;
    if (pos >= text.size()) return 0;
    return decode(text, next);
}

}  // namespace

char32_t decode(std::string_view text, std::size_t& pos) {
    const auto lead = static_cast<unsigned char>(text[pos]);
    std::size_t len = 0;
    char32_t cp = 0;
    if (lead < 0x80) {
        ++pos;
        return lead;
    } else if ((lead & 0xE0) == 0xC0) {
        len = 2;
        cp = lead & 0x1F;
    } else if ((lead & 0xF0) == 0xE0) {
        len = 3;
        cp = lead & 0x0F;
    } else if ((lead & 0xF8) == 0xF0) {
        len = 4;
        cp = lead & 0x07;
    } else {
        ++pos;
        return kReplacement;
    }
    if (pos + len > text.size()) {
        ++pos;
        return kReplacement;
    }
    for (std::size_t i = 1; i < len; ++i) {
        const auto b = static_cast<unsigned char>(text[pos + i]);
        if (!is_continuation(b)) {
            ++pos;
            return kReplacement;
        }
        cp = (cp << 6) | (b & 0x3F);
    }
    // overlong forms, surrogates, out of range
    static constexpr std::array<char32_t, 5> kMin = {0, 0, 0x80, 0x800, 0x10000};
    if (cp < kMin[len] || cp > 0x10FFFF || (cp >= 0xD800 && cp <= 0xDFFF)) {
        ++pos;
        return kReplacement;
    }
    pos += len;
    return cp;
}

void append_utf8(std::string& out, char32_t cp) {
    if (cp < 0x80) {
        out.push_back(static_cast<char>(cp));
    } else if (cp < 0x800) {
        out.push_back(static_cast<char>(0xC0 | (cp >> 6)));
        out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    } else if (cp < 0x10000) {
        out.push_back(static_cast<char>(0xE0 | (cp >> 12)));
        out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
        out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    } else {
        out.push_back(static_cast<char>(0xF0 | (cp >> 18)));
        out.push_back(static_cast<char>(0x80 | ((cp >> 12) & 0x3F)));
        out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
        out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    }
}

bool is_valid_utf8(std::string_view text) {
    std::size_t pos = 0;
    while (pos < text.size()) {
        const std::size_t start = pos;
        const char32_t cp = decode(text, pos);
        // A genuine U+FFFD is three bytes; the error path consumes one.
        if (cp == kReplacement && pos - start != 3) return false;
    }
    return true;
}

bool is_extended_pictographic(char32_t cp) {
    const auto it = std::upper_bound(std::begin(kExtPict), std::end(kExtPict), cp,
                                     [](char32_t v, const Range& r) { return v < r.lo; });
    if (it == std::begin(kExtPict)) return false;
    return cp <= std::prev(it)->hi;
}

bool is_emoji_modifier(char32_t cp) { return cp >= 0x1F3FB && cp <= 0x1F3FF; }

bool is_regional_indicator(char32_t cp) { return cp >= 0x1F1E6 && cp <= 0x1F1FF; }

bool contains_extended_pictographic(std::string_view text) {
    std::size_t pos = 0;
    while (pos < text.size()) {
        if (is_extended_pictographic(decode(text, pos))) return true;
    }
    return false;
}

std::size_t emoji_cluster_length(std::string_view text, std::size_t pos) {
    if (pos >= text.size()) return 0;
    std::size_t next = pos;
    const char32_t first = decode(text, next);

    if (is_keycap_base(first)) {
        std::size_t after = next;
        char32_t cp = peek(text, after, after);
        if (cp == kEmojiPresentation) {
            next = after;
            cp = peek(text, next, after);
        }
        if (cp != kCombiningKeycap) return 0;
        return after - pos;
    }

    if (is_regional_indicator(first)) {
        std::size_t after = next;
        if (is_regional_indicator(peek(text, next, after))) next = after;
        return next - pos;
    }

    if (!is_extended_pictographic(first) && !is_emoji_modifier(first)) return 0;

    for (;;) {
        std::size_t after = next;
        const char32_t cp = peek(text, next, after);
        if (after == next) break;
        if (cp == kEmojiPresentation || cp == kTextPresentation || is_emoji_modifier(cp) ||
            is_tag(cp) || cp == kCombiningKeycap) {
            next = after;
        } else if (cp == kZeroWidthJoiner) {
            std::size_t joined = after;
            const char32_t target = peek(text, after, joined);
            next = (joined != after && is_extended_pictographic(target)) ? joined : after;
        } else {
            break;
        }
    }
    return next - pos;
}

bool is_ascii_space(char c) {
    return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v';
}

}  // namespace emoscript::unicode
