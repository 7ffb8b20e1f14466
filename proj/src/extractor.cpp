#include "pdfuzz/extractor.hpp"

#include <algorithm>
#include <map>
#include <optional>
#include <set>

#include <fmt/format.h>
#include <zlib.h>

#include "pdfuzz/encoding.hpp"
#include "pdfuzz/errors.hpp"
#include "pdfuzz/pdf_lexer.hpp"

namespace pdfuzz {

namespace {

using pdf::Lexer;
using pdf::Object;
using pdf::Token;
using K = Token::Kind;

std::string inflate_stream(std::string_view data, std::size_t offset) {
  z_stream zs{};
  if (inflateInit(&zs) != Z_OK) throw ParseError("zlib initialisation failed", offset);
  zs.next_in = reinterpret_cast<Bytef*>(const_cast<char*>(data.data()));
  zs.avail_in = static_cast<uInt>(data.size());
  std::string out;
  char buf[16384];
  int rc = Z_OK;
  while (rc != Z_STREAM_END) {
    zs.next_out = reinterpret_cast<Bytef*>(buf);
    zs.avail_out = sizeof buf;
    rc = inflate(&zs, Z_NO_FLUSH);
    if (rc != Z_OK && rc != Z_STREAM_END) {
      inflateEnd(&zs);
      throw ParseError("corrupt FlateDecode stream", offset);
    }
    out.append(buf, sizeof buf - zs.avail_out);
    if (rc == Z_OK && zs.avail_in == 0 && zs.avail_out != 0) break;
  }
  inflateEnd(&zs);
  return out;
}

struct Stream {
  pdf::Dict dict;
  std::string data;  // decoded
};

class Document {
 public:
  explicit Document(std::string_view bytes) : bytes_(bytes) {
    if (!bytes_.starts_with("%PDF")) throw ParseError("missing %PDF header", 0);
    read_xref_chain();
  }

  std::vector<std::string> page_contents() {
    const Object* root_ref = pdf::find(trailer_, "Root");
    if (root_ref == nullptr || root_ref->as<pdf::Ref>() == nullptr) {
      throw ParseError("trailer has no /Root reference", trailer_offset_);
    }
    const Object catalog = resolve(*root_ref);
    const auto* catalog_dict = catalog.as<pdf::Dict>();
    if (catalog_dict == nullptr) throw ParseError("catalog is not a dictionary", offset_of(*root_ref));
    const Object* pages = pdf::find(*catalog_dict, "Pages");
    if (pages == nullptr) throw ParseError("catalog has no /Pages", offset_of(*root_ref));

    std::vector<std::string> out;
    std::set<std::uint32_t> path;
    walk_pages(*pages, path, out, 0);
    return out;
  }

 private:
  static constexpr int kMaxTreeDepth = 256;

  void read_xref_chain() {
    const std::size_t sx = bytes_.rfind("startxref");
    if (sx == std::string_view::npos) {
      throw ParseError("missing startxref (file truncated?)", bytes_.size());
    }
    Lexer lex(bytes_);
    lex.seek(sx + 9);
    Token off = lex.next();
    if (off.kind != K::kNumber || !off.integer || off.number < 0) {
      throw ParseError("startxref is not followed by an offset", off.offset);
    }
    std::optional<std::size_t> next = static_cast<std::size_t>(off.number);
    std::set<std::size_t> visited;
    bool first = true;
    while (next) {
      if (!visited.insert(*next).second) throw ParseError("cyclic /Prev chain", *next);
      pdf::Dict trailer = read_xref_section(*next);
      if (first) {
        trailer_ = trailer;
        first = false;
      }
      next.reset();
      if (const Object* prev = pdf::find(trailer, "Prev")) {
        if (const auto* p = prev->as<double>()) next = static_cast<std::size_t>(*p);
      }
    }
  }

  pdf::Dict read_xref_section(std::size_t offset) {
    if (offset >= bytes_.size()) throw ParseError("xref offset beyond end of file", offset);
    Lexer lex(bytes_);
    lex.seek(offset);
    Token kw = lex.next();
    if (kw.kind == K::kNumber) {
      throw ParseError("cross-reference streams are not supported", offset);
    }
    if (kw.kind != K::kKeyword || kw.text != "xref") {
      throw ParseError("malformed xref: expected 'xref' keyword", kw.offset);
    }
    for (;;) {
      Token t = lex.next();
      if (t.kind == K::kKeyword && t.text == "trailer") {
        trailer_offset_ = t.offset;
        Object dict = lex.parse_object(true);
        const auto* d = dict.as<pdf::Dict>();
        if (d == nullptr) throw ParseError("trailer is not a dictionary", t.offset);
        return *d;
      }
      if (t.kind == K::kEnd) throw ParseError("missing trailer", t.offset);
      Token count = lex.next();
      if (t.kind != K::kNumber || !t.integer || count.kind != K::kNumber || !count.integer ||
          t.number < 0 || count.number < 0) {
        throw ParseError("malformed xref subsection header", t.offset);
      }
      const auto start = static_cast<std::uint32_t>(t.number);
      const auto n = static_cast<std::uint32_t>(count.number);
      for (std::uint32_t i = 0; i < n; ++i) {
        Token obj_off = lex.next();
        Token gen = lex.next();
        Token type = lex.next();
        if (obj_off.kind != K::kNumber || gen.kind != K::kNumber || type.kind != K::kKeyword ||
            (type.text != "n" && type.text != "f")) {
          throw ParseError("malformed xref entry", obj_off.offset);
        }
        // Newer sections are read first and take precedence.
        if (type.text == "n" && !xref_.contains(start + i)) {
          if (obj_off.number < 0 || obj_off.number >= static_cast<double>(bytes_.size())) {
            throw ParseError(fmt::format("xref entry for object {} points outside the file", start + i),
                             obj_off.offset);
          }
          xref_[start + i] = static_cast<std::size_t>(obj_off.number);
        }
      }
    }
  }

  std::size_t offset_of(const Object& ref) const {
    if (const auto* r = ref.as<pdf::Ref>()) {
      auto it = xref_.find(r->num);
      if (it != xref_.end()) return it->second;
    }
    return 0;
  }

  // Returns the object and, for streams, its decoded data.
  std::pair<Object, std::optional<Stream>> load(const pdf::Ref& ref) {
    auto it = xref_.find(ref.num);
    if (it == xref_.end()) return {Object{pdf::Null{}}, std::nullopt};
    const std::size_t offset = it->second;
    Lexer lex(bytes_);
    lex.seek(offset);
    Token num = lex.next();
    Token gen = lex.next();
    Token kw = lex.next();
    if (num.kind != K::kNumber || gen.kind != K::kNumber || kw.kind != K::kKeyword ||
        kw.text != "obj" || static_cast<std::uint32_t>(num.number) != ref.num) {
      throw ParseError(fmt::format("xref entry for object {} does not point at its header", ref.num),
                       offset);
    }
    Object obj = lex.parse_object(true);
    Token t = lex.next();
    if (t.kind == K::kKeyword && t.text == "stream") {
      const auto* dict = obj.as<pdf::Dict>();
      if (dict == nullptr) throw ParseError("stream without dictionary", t.offset);
      std::size_t data_start = t.offset + 6;
      if (data_start < bytes_.size() && bytes_[data_start] == '\r') ++data_start;
      if (data_start < bytes_.size() && bytes_[data_start] == '\n') ++data_start;
      return {obj, read_stream(*dict, data_start)};
    }
    return {obj, std::nullopt};
  }

  Stream read_stream(const pdf::Dict& dict, std::size_t data_start) {
    std::optional<std::size_t> length;
    if (const Object* len = pdf::find(dict, "Length")) {
      Object resolved = resolve(*len);
      if (const auto* d = resolved.as<double>(); d != nullptr && *d >= 0) {
        length = static_cast<std::size_t>(*d);
      }
    }
    std::size_t data_end = 0;
    auto endstream_follows = [&](std::size_t end) {
      if (end > bytes_.size()) return false;
      std::size_t p = end;
      while (p < bytes_.size() && pdf::is_pdf_whitespace(bytes_[p])) ++p;
      return bytes_.substr(p).starts_with("endstream");
    };
    if (length && endstream_follows(data_start + *length)) {
      data_end = data_start + *length;
    } else {
      const std::size_t found = bytes_.find("endstream", data_start);
      if (found == std::string_view::npos) throw ParseError("unterminated stream", data_start);
      data_end = found;
      while (data_end > data_start &&
             (bytes_[data_end - 1] == '\n' || bytes_[data_end - 1] == '\r')) {
        --data_end;
      }
    }
    Stream s{dict, std::string(bytes_.substr(data_start, data_end - data_start))};

    std::vector<std::string> filters;
    if (const Object* f = pdf::find(dict, "Filter")) {
      if (const auto* name = f->as<pdf::Name>()) {
        filters.push_back(name->value);
      } else if (const auto* arr = f->as<pdf::Array>()) {
        for (const auto& item : *arr) {
          if (const auto* n = item.as<pdf::Name>()) filters.push_back(n->value);
        }
      }
    }
    for (const auto& filter : filters) {
      if (filter == "FlateDecode" || filter == "Fl") {
        s.data = inflate_stream(s.data, data_start);
      } else {
        throw ParseError(fmt::format("unsupported stream filter /{}", filter), data_start);
      }
    }
    return s;
  }

  Object resolve(const Object& obj) {
    const Object* cur = &obj;
    Object holder;
    for (int hops = 0; hops < 32; ++hops) {
      const auto* ref = cur->as<pdf::Ref>();
      if (ref == nullptr) return *cur;
      holder = load(*ref).first;
      cur = &holder;
    }
    throw ParseError("reference chain too long", offset_of(obj));
  }

  void walk_pages(const Object& node_ref, std::set<std::uint32_t>& path,
                  std::vector<std::string>& out, int depth) {
    if (depth > kMaxTreeDepth) throw ParseError("page tree too deep", offset_of(node_ref));
    const auto* ref = node_ref.as<pdf::Ref>();
    if (ref != nullptr && !path.insert(ref->num).second) {
      throw ParseError(fmt::format("cyclic page tree at object {}", ref->num), offset_of(node_ref));
    }
    const Object node = resolve(node_ref);
    const auto* dict = node.as<pdf::Dict>();
    if (dict == nullptr) throw ParseError("page tree node is not a dictionary", offset_of(node_ref));

    const Object* type = pdf::find(*dict, "Type");
    const Object* kids = pdf::find(*dict, "Kids");
    const bool is_tree = (type && type->as<pdf::Name>() && type->as<pdf::Name>()->value == "Pages") ||
                         (type == nullptr && kids != nullptr);
    if (is_tree) {
      if (kids != nullptr) {
        const Object kid_list = resolve(*kids);
        if (const auto* arr = kid_list.as<pdf::Array>()) {
          for (const auto& kid : *arr) walk_pages(kid, path, out, depth + 1);
        }
      }
    } else {
      out.push_back(page_content(*dict));
    }
    if (ref != nullptr) path.erase(ref->num);
  }

  std::string page_content(const pdf::Dict& page) {
    const Object* contents = pdf::find(page, "Contents");
    if (contents == nullptr) return {};
    std::vector<Object> parts;
    if (contents->as<pdf::Ref>()) {
      // The reference may name a stream or an array of streams.
      auto [obj, stream] = load(*contents->as<pdf::Ref>());
      if (stream) return stream->data;
      if (const auto* arr = obj.as<pdf::Array>()) parts = *arr;
    } else if (const auto* arr = contents->as<pdf::Array>()) {
      parts = *arr;
    }
    std::string out;
    for (std::size_t i = 0; i < parts.size(); ++i) {
      const auto* r = parts[i].as<pdf::Ref>();
      if (r == nullptr) continue;
      auto [obj, stream] = load(*r);
      if (!stream) continue;
      if (i != 0) out.push_back('\n');
      out += stream->data;
    }
    return out;
  }

  std::string_view bytes_;
  std::map<std::uint32_t, std::size_t> xref_;
  pdf::Dict trailer_;
  std::size_t trailer_offset_ = 0;
};

std::optional<double> number_of(const Object& o) {
  if (const auto* d = o.as<double>()) return *d;
  return std::nullopt;
}

std::optional<ContentOp> make_op(std::string_view op, const std::vector<Object>& args) {
  auto last = [&](std::size_t k) -> const Object& { return args[args.size() - k]; };
  if (op == "Tf" && args.size() >= 2) {
    const auto* name = last(2).as<pdf::Name>();
    auto size = number_of(last(1));
    if (name && size) return op::SetFont{name->value, *size};
  } else if (op == "Tm" && args.size() >= 6) {
    double v[6];
    for (std::size_t i = 0; i < 6; ++i) {
      auto n = number_of(last(6 - i));
      if (!n) return std::nullopt;
      v[i] = *n;
    }
    return op::SetTextMatrix{v[0], v[1], v[2], v[3], v[4], v[5]};
  } else if (op == "Td" && args.size() >= 2) {
    auto tx = number_of(last(2));
    auto ty = number_of(last(1));
    if (tx && ty) return op::MoveRelative{*tx, *ty};
  } else if (op == "Tj" && !args.empty()) {
    if (const auto* s = last(1).as<pdf::String>()) return op::ShowString{s->bytes};
  } else if (op == "TJ" && !args.empty()) {
    if (const auto* arr = last(1).as<pdf::Array>()) {
      op::ShowArray sa;
      for (const auto& item : *arr) {
        if (const auto* s = item.as<pdf::String>()) {
          sa.items.emplace_back(s->bytes);
        } else if (auto n = number_of(item)) {
          sa.items.emplace_back(*n);
        }
      }
      return sa;
    }
  }
  return std::nullopt;
}

struct Matrix {
  double a = 1, b = 0, c = 0, d = 1, e = 0, f = 0;

  // Pre-multiplies by a translation: [1 0 0 1 tx ty] x *this.
  Matrix translated(double tx, double ty) const {
    Matrix m = *this;
    m.e = tx * a + ty * c + e;
    m.f = tx * b + ty * d + f;
    return m;
  }
};

}  // namespace

std::vector<std::string> parse_document(std::string_view bytes) {
  Document doc(bytes);
  return doc.page_contents();
}

OpList parse_content_stream(std::string_view bytes) {
  Lexer lex(bytes);
  OpList ops;
  std::vector<Object> operands;
  for (;;) {
    Token t = lex.next();
    if (t.kind == K::kEnd) break;
    if (t.kind != K::kKeyword) {
      operands.push_back(lex.parse_object_from(std::move(t), false));
      continue;
    }
    if (t.text == "true" || t.text == "false" || t.text == "null") {
      operands.push_back(lex.parse_object_from(std::move(t), false));
      continue;
    }
    if (t.text == "ID") {
      // Inline image data runs to the next whitespace-delimited EI.
      std::size_t p = lex.pos() + 1;
      for (;;) {
        p = bytes.find("EI", p);
        if (p == std::string_view::npos) throw ParseError("unterminated inline image", t.offset);
        const bool before = pdf::is_pdf_whitespace(bytes[p - 1]);
        const bool after = p + 2 >= bytes.size() || pdf::is_pdf_whitespace(bytes[p + 2]);
        if (before && after) break;
        ++p;
      }
      lex.seek(p + 2);
      operands.clear();
      continue;
    }
    if (auto op = make_op(t.text, operands)) ops.push_back(std::move(*op));
    operands.clear();
  }
  return ops;
}

std::vector<ExtractedGlyph> interpret(const OpList& ops, std::size_t page, const FontSpec& metrics,
                                      std::size_t first_stream_index) {
  std::vector<ExtractedGlyph> glyphs;
  Matrix text_matrix;
  Matrix line_matrix;
  double font_size = 0.0;
  bool font_set = false;

  auto require_font = [&] {
    if (!font_set) {
      throw InterpretError(fmt::format("page {}: text shown before any font was selected", page));
    }
  };
  auto show = [&](const std::string& bytes) {
    require_font();
    const double advance = metrics.glyph_width_em * font_size;
    for (unsigned char b : bytes) {
      ExtractedGlyph g;
      g.ch = winansi::decode(b);
      g.x = text_matrix.e;
      g.y = text_matrix.f;
      g.page = page;
      g.stream_index = first_stream_index + glyphs.size();
      glyphs.push_back(g);
      text_matrix = text_matrix.translated(advance, 0.0);
    }
  };

  for (const auto& op : ops) {
    std::visit(
        [&](const auto& o) {
          using T = std::decay_t<decltype(o)>;
          if constexpr (std::is_same_v<T, op::SetFont>) {
            font_size = o.size;
            font_set = true;
          } else if constexpr (std::is_same_v<T, op::SetTextMatrix>) {
            text_matrix = Matrix{o.a, o.b, o.c, o.d, o.e, o.f};
            line_matrix = text_matrix;
          } else if constexpr (std::is_same_v<T, op::MoveRelative>) {
            line_matrix = line_matrix.translated(o.tx, o.ty);
            text_matrix = line_matrix;
          } else if constexpr (std::is_same_v<T, op::ShowString>) {
            show(o.bytes);
          } else if constexpr (std::is_same_v<T, op::ShowArray>) {
            require_font();
            for (const auto& item : o.items) {
              if (const auto* s = std::get_if<std::string>(&item)) {
                show(*s);
              } else {
                text_matrix = text_matrix.translated(-std::get<double>(item) / 1000.0 * font_size, 0.0);
              }
            }
          }
        },
        op);
  }
  return glyphs;
}

ExtractionResult extract_text(std::string_view bytes, const FontSpec& metrics) {
  ExtractionResult result;
  const auto pages = parse_document(bytes);
  for (std::size_t page = 0; page < pages.size(); ++page) {
    auto glyphs = interpret(parse_content_stream(pages[page]), page, metrics, result.glyphs.size());
    for (auto& g : glyphs) {
      result.text.push_back(g.ch);
      result.glyphs.push_back(g);
    }
  }
  return result;
}

}  // namespace pdfuzz
