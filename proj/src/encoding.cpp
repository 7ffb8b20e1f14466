#include "pdfuzz/encoding.hpp"

#include <array>

#include <fmt/format.h>

#include "pdfuzz/errors.hpp"

namespace pdfuzz {

EncodingError::EncodingError(char32_t ch, std::size_t index)
    : Error(fmt::format("character {} at index {} is not encodable in WinAnsiEncoding",
                        describe_char(ch), index)),
      character_(ch),
      index_(index) {}

ParseError::ParseError(const std::string& what, std::size_t offset, Unit unit)
    : Error(fmt::format("{} (at {} {})", what, unit == Unit::kByte ? "byte offset" : "line", offset)),
      offset_(offset),
      unit_(unit) {}

namespace winansi {
namespace {

// 0x80..0x9F; zero marks an undefined slot.
constexpr std::array<char32_t, 32> kHighControlBlock = {
    0x20AC, 0,      0x201A, 0x0192, 0x201E, 0x2026, 0x2020, 0x2021,
    0x02C6, 0x2030, 0x0160, 0x2039, 0x0152, 0,      0x017D, 0,
    0,      0x2018, 0x2019, 0x201C, 0x201D, 0x2022, 0x2013, 0x2014,
    0x02DC, 0x2122, 0x0161, 0x203A, 0x0153, 0,      0x017E, 0x0178,
};

}  // namespace

std::optional<std::uint8_t> encode(char32_t ch) {
  if (ch >= 0x20 && ch <= 0x7E) return static_cast<std::uint8_t>(ch);
  if (ch >= 0xA0 && ch <= 0xFF) return static_cast<std::uint8_t>(ch);
  for (std::size_t i = 0; i < kHighControlBlock.size(); ++i) {
    if (kHighControlBlock[i] != 0 && kHighControlBlock[i] == ch) {
      return static_cast<std::uint8_t>(0x80 + i);
    }
  }
  return std::nullopt;
}

char32_t decode(std::uint8_t byte) {
  if (byte >= 0x20 && byte <= 0x7E) return byte;
  if (byte >= 0xA0) return byte;
  if (byte >= 0x80) {
    char32_t ch = kHighControlBlock[byte - 0x80];
    return ch != 0 ? ch : U'�';
  }
  return U'�';
}

}  // namespace winansi

std::u32string utf8_to_u32(std::string_view s) {
  std::u32string out;
  out.reserve(s.size());
  std::size_t i = 0;
  while (i < s.size()) {
    auto b0 = static_cast<unsigned char>(s[i]);
    int len = 0;
    char32_t cp = 0;
    if (b0 < 0x80) {
      len = 1;
      cp = b0;
    } else if ((b0 & 0xE0) == 0xC0) {
      len = 2;
      cp = b0 & 0x1F;
    } else if ((b0 & 0xF0) == 0xE0) {
      len = 3;
      cp = b0 & 0x0F;
    } else if ((b0 & 0xF8) == 0xF0) {
      len = 4;
      cp = b0 & 0x07;
    } else {
      out.push_back(U'�');
      ++i;
      continue;
    }
    if (i + len > s.size()) {
      out.push_back(U'�');
      break;
    }
    bool ok = true;
    for (int k = 1; k < len; ++k) {
      auto b = static_cast<unsigned char>(s[i + k]);
      if ((b & 0xC0) != 0x80) {
        ok = false;
        break;
      }
      cp = (cp << 6) | (b & 0x3F);
    }
    if (!ok) {
      out.push_back(U'�');
      ++i;
      continue;
    }
    out.push_back(cp);
    i += len;
  }
  return out;
}

std::string u32_to_utf8(char32_t ch) {
  std::string out;
  if (ch < 0x80) {
    out.push_back(static_cast<char>(ch));
  } else if (ch < 0x800) {
    out.push_back(static_cast<char>(0xC0 | (ch >> 6)));
    out.push_back(static_cast<char>(0x80 | (ch & 0x3F)));
  } else if (ch < 0x10000) {
    out.push_back(static_cast<char>(0xE0 | (ch >> 12)));
    out.push_back(static_cast<char>(0x80 | ((ch >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (ch & 0x3F)));
  } else {
    out.push_back(static_cast<char>(0xF0 | (ch >> 18)));
    out.push_back(static_cast<char>(0x80 | ((ch >> 12) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | ((ch >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (ch & 0x3F)));
  }
  return out;
}

std::string u32_to_utf8(std::u32string_view s) {
  std::string out;
  out.reserve(s.size());
  for (char32_t ch : s) out += u32_to_utf8(ch);
  return out;
}

std::string describe_char(char32_t ch) {
  auto code = fmt::format("U+{:04X}", static_cast<std::uint32_t>(ch));
  if (ch >= 0x20 && ch != 0x7F && ch <= 0x10FFFF) {
    return fmt::format("{} '{}'", code, u32_to_utf8(ch));
  }
  return code;
}

}  // namespace pdfuzz
