#pragma once

#include <cstddef>
#include <string>
#include <string_view>

namespace emoscript::unicode {

inline constexpr char32_t kReplacement = 0xFFFD;
inline constexpr char32_t kZeroWidthJoiner = 0x200D;
inline constexpr char32_t kTextPresentation = 0xFE0E;
inline constexpr char32_t kEmojiPresentation = 0xFE0F;
inline constexpr char32_t kCombiningKeycap = 0x20E3;

// Decodes one code point at `pos` and advances it. Malformed sequences yield
// U+FFFD and consume a single byte.
char32_t decode(std::string_view text, std::size_t& pos);

void append_utf8(std::string& out, char32_t cp);

bool is_valid_utf8(std::string_view text);

bool is_extended_pictographic(char32_t cp);
bool is_emoji_modifier(char32_t cp);
bool is_regional_indicator(char32_t cp);

bool contains_extended_pictographic(std::string_view text);

// Byte length of the emoji grapheme cluster starting at `pos`, or 0 when no
// emoji starts there. A cluster is an Extended_Pictographic base (or a
// regional indicator pair, keycap sequence, or lone skin-tone modifier)
// followed by any variation selectors, modifiers, tag characters, and
// ZWJ-joined pictographs.
std::size_t emoji_cluster_length(std::string_view text, std::size_t pos);

bool is_ascii_space(char c);

}  // namespace emoscript::unicode
