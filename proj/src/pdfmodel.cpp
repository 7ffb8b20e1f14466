#include "pdfuzz/pdfmodel.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <set>

#include <fmt/format.h>

#include "pdfuzz/encoding.hpp"
#include "pdfuzz/errors.hpp"

namespace pdfuzz {

void validate(const FontSpec& font) {
  if (!(font.glyph_width_em > 0.0) || !std::isfinite(font.glyph_width_em)) {
    throw ConfigError("font glyph width must be a positive finite fraction of an em");
  }
  if (font.base_font_name.empty()) throw ConfigError("font base name is empty");
  if (font.encoding != "WinAnsiEncoding") {
    throw ConfigError(fmt::format("unsupported font encoding '{}'", font.encoding));
  }
}

void validate(const PageGeometry& g) {
  if (!std::isfinite(g.width_pt) || !std::isfinite(g.height_pt) || !std::isfinite(g.margin_pt) ||
      g.margin_pt < 0.0) {
    throw ConfigError("page geometry values must be finite and the margin non-negative");
  }
  if (!(g.width_pt > 2.0 * g.margin_pt) || !(g.height_pt > 2.0 * g.margin_pt)) {
    throw ConfigError(fmt::format("page {}x{} pt leaves no usable area inside a {} pt margin",
                                  g.width_pt, g.height_pt, g.margin_pt));
  }
}

std::string format_number(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.2f", quantize(v));
  return buf;
}

namespace {

std::string escape_string(const std::string& bytes) {
  std::string out;
  out.reserve(bytes.size() + 2);
  out.push_back('(');
  for (unsigned char b : bytes) {
    if (b == '(' || b == ')' || b == '\\') {
      out.push_back('\\');
      out.push_back(static_cast<char>(b));
    } else if (b >= 0x20 && b <= 0x7E) {
      out.push_back(static_cast<char>(b));
    } else {
      char buf[8];
      std::snprintf(buf, sizeof buf, "\\%03o", b);
      out += buf;
    }
  }
  out.push_back(')');
  return out;
}

struct OpWriter {
  std::string& out;

  void operator()(const op::SetFont& o) const {
    out += fmt::format("/{} {} Tf\n", o.name, format_number(o.size));
  }
  void operator()(const op::SetTextMatrix& o) const {
    out += fmt::format("{} {} {} {} {} {} Tm\n", format_number(o.a), format_number(o.b),
                       format_number(o.c), format_number(o.d), format_number(o.e),
                       format_number(o.f));
  }
  void operator()(const op::MoveRelative& o) const {
    out += fmt::format("{} {} Td\n", format_number(o.tx), format_number(o.ty));
  }
  void operator()(const op::ShowString& o) const {
    out += escape_string(o.bytes);
    out += " Tj\n";
  }
  void operator()(const op::ShowArray& o) const {
    out.push_back('[');
    bool first = true;
    for (const auto& item : o.items) {
      if (!first) out.push_back(' ');
      first = false;
      if (const auto* s = std::get_if<std::string>(&item)) {
        out += escape_string(*s);
      } else {
        out += format_number(std::get<double>(item));
      }
    }
    out += "] TJ\n";
  }
};

bool finite_operands(const ContentOp& op) {
  return std::visit(
      [](const auto& o) {
        using T = std::decay_t<decltype(o)>;
        if constexpr (std::is_same_v<T, op::SetFont>) {
          return std::isfinite(o.size);
        } else if constexpr (std::is_same_v<T, op::SetTextMatrix>) {
          return std::isfinite(o.a) && std::isfinite(o.b) && std::isfinite(o.c) &&
                 std::isfinite(o.d) && std::isfinite(o.e) && std::isfinite(o.f);
        } else if constexpr (std::is_same_v<T, op::MoveRelative>) {
          return std::isfinite(o.tx) && std::isfinite(o.ty);
        } else if constexpr (std::is_same_v<T, op::ShowArray>) {
          return std::all_of(o.items.begin(), o.items.end(), [](const auto& item) {
            const auto* d = std::get_if<double>(&item);
            return d == nullptr || std::isfinite(*d);
          });
        } else {
          return true;
        }
      },
      op);
}

bool is_show(const ContentOp& op) {
  return std::holds_alternative<op::ShowString>(op) || std::holds_alternative<op::ShowArray>(op);
}

}  // namespace

std::string to_string(const ContentOp& op) {
  std::string out;
  std::visit(OpWriter{out}, op);
  if (!out.empty() && out.back() == '\n') out.pop_back();
  return out;
}

std::ostream& operator<<(std::ostream& os, const ContentOp& op) { return os << to_string(op); }

OpList ops_from_placements(std::span<const GlyphPlacement> placements, const FontSpec& font,
                           double font_size_pt) {
  OpList ops;
  ops.reserve(2 * placements.size() + 1);
  validate(font);
  ops.emplace_back(op::SetFont{kFontResourceName, font_size_pt});
  for (std::size_t i = 0; i < placements.size(); ++i) {
    const auto& p = placements[i];
    auto byte = winansi::encode(p.ch);
    if (!byte) throw EncodingError(p.ch, i);
    ops.emplace_back(op::SetTextMatrix{1, 0, 0, 1, p.x, p.y});
    ops.emplace_back(op::ShowString{std::string(1, static_cast<char>(*byte))});
  }
  return ops;
}

DocumentBlueprint blueprint_from_placements(std::span<const GlyphPlacement> placements,
                                            const PageGeometry& geometry, const FontSpec& font,
                                            double font_size_pt) {
  std::size_t pages = 1;
  for (const auto& p : placements) pages = std::max(pages, p.page + 1);

  std::vector<std::vector<GlyphPlacement>> by_page(pages);
  for (const auto& p : placements) by_page[p.page].push_back(p);

  for (std::size_t i = 0; i < placements.size(); ++i) {
    if (!winansi::encodable(placements[i].ch)) throw EncodingError(placements[i].ch, i);
  }

  DocumentBlueprint bp{geometry, font, font_size_pt, {}};
  bp.ops_per_page.reserve(pages);
  for (const auto& page : by_page) {
    bp.ops_per_page.push_back(ops_from_placements(page, font, font_size_pt));
  }
  return bp;
}

void validate(const DocumentBlueprint& bp) {
  validate(bp.geometry);
  validate(bp.font);
  if (!(bp.font_size_pt > 0.0) || !std::isfinite(bp.font_size_pt)) {
    throw ConfigError("font size must be positive");
  }
  for (std::size_t page = 0; page < bp.ops_per_page.size(); ++page) {
    bool font_set = false;
    for (std::size_t i = 0; i < bp.ops_per_page[page].size(); ++i) {
      const auto& op = bp.ops_per_page[page][i];
      if (!finite_operands(op)) {
        throw ContractError(fmt::format("page {} op {} has a non-finite operand", page, i));
      }
      if (std::holds_alternative<op::SetFont>(op)) font_set = true;
      if (is_show(op) && !font_set) {
        throw ContractError(fmt::format("page {} op {} shows text before any font is set", page, i));
      }
    }
  }
}

std::string content_stream(const OpList& ops) {
  std::string out = "BT\n";
  OpWriter writer{out};
  for (const auto& op : ops) std::visit(writer, op);
  out += "ET\n";
  return out;
}

std::string serialize(const DocumentBlueprint& bp) {
  validate(bp);

  const std::size_t pages = std::max<std::size_t>(1, bp.ops_per_page.size());
  // 1 catalog, 2 page tree, 3 font, then (page, contents) pairs.
  const std::size_t object_count = 3 + 2 * pages;
  std::vector<std::size_t> offsets(object_count + 1, 0);

  std::string out = "%PDF-1.7\n%\xE2\xE3\xCF\xD3\n";
  auto begin_object = [&](std::size_t num) {
    offsets[num] = out.size();
    out += fmt::format("{} 0 obj\n", num);
  };

  begin_object(1);
  out += "<< /Type /Catalog /Pages 2 0 R >>\nendobj\n";

  begin_object(2);
  out += "<< /Type /Pages /Kids [";
  for (std::size_t p = 0; p < pages; ++p) {
    if (p != 0) out.push_back(' ');
    out += fmt::format("{} 0 R", 4 + 2 * p);
  }
  out += fmt::format("] /Count {} >>\nendobj\n", pages);

  begin_object(3);
  out += fmt::format("<< /Type /Font /Subtype /Type1 /BaseFont /{} /Encoding /{} >>\nendobj\n",
                     bp.font.base_font_name, bp.font.encoding);

  for (std::size_t p = 0; p < pages; ++p) {
    static const OpList kEmpty;
    const OpList& ops = p < bp.ops_per_page.size() ? bp.ops_per_page[p] : kEmpty;

    std::set<std::string> font_names;
    for (const auto& op : ops) {
      if (const auto* sf = std::get_if<op::SetFont>(&op)) font_names.insert(sf->name);
    }
    if (font_names.empty()) font_names.insert(kFontResourceName);
    std::string font_dict;
    for (const auto& name : font_names) font_dict += fmt::format(" /{} 3 0 R", name);

    const std::size_t page_obj = 4 + 2 * p;
    begin_object(page_obj);
    out += fmt::format(
        "<< /Type /Page /Parent 2 0 R /MediaBox [0 0 {} {}] /Resources << /Font <<{} >> >> "
        "/Contents {} 0 R >>\nendobj\n",
        format_number(bp.geometry.width_pt), format_number(bp.geometry.height_pt), font_dict,
        page_obj + 1);

    const std::string stream = content_stream(ops);
    begin_object(page_obj + 1);
    out += fmt::format("<< /Length {} >>\nstream\n", stream.size());
    out += stream;
    out += "endstream\nendobj\n";
  }

  const std::size_t xref_offset = out.size();
  out += fmt::format("xref\n0 {}\n", object_count + 1);
  out += "0000000000 65535 f \n";
  for (std::size_t i = 1; i <= object_count; ++i) {
    out += fmt::format("{:010d} 00000 n \n", offsets[i]);
  }
  out += fmt::format("trailer\n<< /Size {} /Root 1 0 R >>\nstartxref\n{}\n%%EOF\n",
                     object_count + 1, xref_offset);
  return out;
}

}  // namespace pdfuzz
