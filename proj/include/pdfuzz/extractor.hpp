#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "pdfuzz/pdfmodel.hpp"
#include "pdfuzz/types.hpp"

namespace pdfuzz {

struct ExtractedGlyph {
  char32_t ch = U' ';
  double x = 0.0;
  double y = 0.0;
  std::size_t page = 0;
  std::size_t stream_index = 0;

  bool operator==(const ExtractedGlyph&) const = default;
};

struct ExtractionResult {
  std::vector<ExtractedGlyph> glyphs;  // stream order
  std::u32string text;                 // text[i] == glyphs[i].ch
};

// Decoded content stream bytes of every page, in page-tree order. Supports
// classic xref tables (with /Prev chains) and unfiltered or FlateDecode
// streams. Throws ParseError carrying the byte offset of the problem.
std::vector<std::string> parse_document(std::string_view bytes);

// Tf/Tm/Td/Tj/TJ become ContentOps; BT/ET delimit text objects and every
// other operator is dropped together with its operands. Throws ParseError
// for unbalanced strings, arrays or dictionaries.
OpList parse_content_stream(std::string_view bytes);

// Runs the text state machine over one page's ops and emits one glyph per
// shown byte, in stream order. Every glyph advances the pen by
// metrics.glyph_width_em * font size; TJ numbers shift it by
// -n/1000 * font size. Throws InterpretError if text is shown before Tf.
std::vector<ExtractedGlyph> interpret(const OpList& ops, std::size_t page,
                                      const FontSpec& metrics = {},
                                      std::size_t first_stream_index = 0);

// parse_document -> parse_content_stream -> interpret, pages concatenated.
ExtractionResult extract_text(std::string_view bytes, const FontSpec& metrics = {});

}  // namespace pdfuzz
