#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace pdfuzz {

// WinAnsiEncoding, the single-byte Latin encoding used for all emitted text.
namespace winansi {

std::optional<std::uint8_t> encode(char32_t ch);

// Returns U+FFFD for undefined code points.
char32_t decode(std::uint8_t byte);

inline bool encodable(char32_t ch) { return encode(ch).has_value(); }

}  // namespace winansi

// UTF-8 <-> UTF-32. Invalid UTF-8 sequences decode to U+FFFD.
std::u32string utf8_to_u32(std::string_view s);
std::string u32_to_utf8(std::u32string_view s);
std::string u32_to_utf8(char32_t ch);

// Human readable form used in error messages, e.g. "U+00E9 'é'".
std::string describe_char(char32_t ch);

}  // namespace pdfuzz
