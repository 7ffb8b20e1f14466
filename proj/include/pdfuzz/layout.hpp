#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "pdfuzz/types.hpp"

namespace pdfuzz {

struct LayoutConfig {
  PageGeometry geometry;
  FontSpec font;
  double font_size_pt = 12.0;
  double line_height_pt = 14.4;

  double advance() const { return font.advance(font_size_pt); }
};

// Throws ConfigError if the page has no room for a single glyph or line.
void validate(const LayoutConfig& config);

std::size_t max_columns(const LayoutConfig& config);
std::size_t lines_per_page(const LayoutConfig& config);

struct LayoutResult {
  std::vector<GlyphPlacement> placements;  // reading order
  LayoutConfig config;

  std::size_t page_count() const;
};

// Greedy word wrap under monospace metrics.
//
//  - Every character except '\n' becomes one placement (spaces are
//    positioned glyphs), except spaces consumed at a wrap point.
//  - '\n' ends the current line ("\r\n" and a lone '\r' count as one '\n').
//  - A run of spaces that would not fit together with the following word
//    is dropped and the word starts the next line. Trailing spaces of a
//    paragraph are kept only if they all fit.
//  - Words longer than a line are split hard at the column limit.
//  - Lines run top to bottom; the first baseline sits one font size below
//    the top margin, and overflow continues on a new page.
//
// Throws EncodingError for characters outside WinAnsiEncoding.
LayoutResult layout_text(std::u32string_view text, const LayoutConfig& config);
LayoutResult layout_text(std::string_view utf8_text, const LayoutConfig& config);

// Characters ordered by reading_index.
std::u32string reference_sequence(std::span<const GlyphPlacement> placements);
inline std::u32string reference_sequence(const LayoutResult& result) {
  return reference_sequence(result.placements);
}

}  // namespace pdfuzz
