#pragma once

#include <cmath>
#include <cstddef>
#include <string>

namespace pdfuzz {

// A standard (non-embedded) base-14 font with fixed advance width.
struct FontSpec {
  std::string base_font_name = "Courier";
  double glyph_width_em = 0.6;
  std::string encoding = "WinAnsiEncoding";

  double advance(double font_size_pt) const { return glyph_width_em * font_size_pt; }

  bool operator==(const FontSpec&) const = default;
};

// Page size and uniform margin, in PDF points (1/72 in).
struct PageGeometry {
  double width_pt = 612.0;
  double height_pt = 792.0;
  double margin_pt = 72.0;

  bool operator==(const PageGeometry&) const = default;
};

// Throws ConfigError when the invariants do not hold.
void validate(const FontSpec& font);
void validate(const PageGeometry& geometry);

// One character bound to absolute page coordinates. The origin is the
// bottom-left corner of the page; y is the baseline.
struct GlyphPlacement {
  char32_t ch = U' ';
  double x = 0.0;
  double y = 0.0;
  std::size_t page = 0;
  std::size_t reading_index = 0;

  bool operator==(const GlyphPlacement&) const = default;
};

// All coordinates are snapped to this grid before serialization so that
// written and reparsed values compare equal.
inline constexpr double kCoordinateQuantum = 0.01;

inline double quantize(double v) {
  double q = std::round(v * 100.0) / 100.0;
  return q == 0.0 ? 0.0 : q;  // no negative zero
}

}  // namespace pdfuzz
