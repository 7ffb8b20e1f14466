#pragma once

#include <cstddef>
#include <iosfwd>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "pdfuzz/types.hpp"

namespace pdfuzz {

namespace op {

// Tf
struct SetFont {
  std::string name;
  double size = 0.0;
  bool operator==(const SetFont&) const = default;
};

// Tm
struct SetTextMatrix {
  double a = 1, b = 0, c = 0, d = 1, e = 0, f = 0;
  bool operator==(const SetTextMatrix&) const = default;
};

// Td
struct MoveRelative {
  double tx = 0, ty = 0;
  bool operator==(const MoveRelative&) const = default;
};

// Tj. `bytes` holds the encoded string exactly as it appears in the stream
// after escape processing.
struct ShowString {
  std::string bytes;
  bool operator==(const ShowString&) const = default;
};

// TJ. Numbers are adjustments in thousandths of text space units.
struct ShowArray {
  using Item = std::variant<std::string, double>;
  std::vector<Item> items;
  bool operator==(const ShowArray&) const = default;
};

}  // namespace op

using ContentOp =
    std::variant<op::SetFont, op::SetTextMatrix, op::MoveRelative, op::ShowString, op::ShowArray>;

std::string to_string(const ContentOp& op);
std::ostream& operator<<(std::ostream& os, const ContentOp& op);

using OpList = std::vector<ContentOp>;

struct DocumentBlueprint {
  PageGeometry geometry;
  FontSpec font;
  double font_size_pt = 12.0;
  std::vector<OpList> ops_per_page;
};

// Resource name under which the blueprint font is registered on every page.
inline constexpr const char* kFontResourceName = "F1";

// Formats a number the way the writer does: fixed, two decimals.
std::string format_number(double v);

// One Tm + Tj pair per glyph, in the order given, after a single Tf.
// Throws EncodingError naming the offending character and its list index.
OpList ops_from_placements(std::span<const GlyphPlacement> placements, const FontSpec& font,
                           double font_size_pt);

// Groups placements by page (keeping their relative order) and builds one
// op list per page. The page count is max(1, highest page + 1).
DocumentBlueprint blueprint_from_placements(std::span<const GlyphPlacement> placements,
                                            const PageGeometry& geometry, const FontSpec& font,
                                            double font_size_pt);

// Checks the blueprint invariants; throws ConfigError / ContractError.
void validate(const DocumentBlueprint& blueprint);

// The content stream bytes for one page, BT ... ET included.
std::string content_stream(const OpList& ops);

// Complete PDF 1.7 file: uncompressed content streams, classic xref table.
std::string serialize(const DocumentBlueprint& blueprint);

}  // namespace pdfuzz
