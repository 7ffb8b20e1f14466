#include "pdfuzz/layout.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

#include "pdfuzz/encoding.hpp"
#include "pdfuzz/errors.hpp"

namespace pdfuzz {

namespace {

constexpr double kFloorSlack = 1e-9;

double first_baseline(const LayoutConfig& c) {
  return c.geometry.height_pt - c.geometry.margin_pt - c.font_size_pt;
}

std::u32string normalize_newlines(std::u32string_view text) {
  std::u32string out;
  out.reserve(text.size());
  for (std::size_t i = 0; i < text.size(); ++i) {
    if (text[i] == U'\r') {
      out.push_back(U'\n');
      if (i + 1 < text.size() && text[i + 1] == U'\n') ++i;
    } else {
      out.push_back(text[i]);
    }
  }
  return out;
}

class LineSink {
 public:
  LineSink(const LayoutConfig& config, std::vector<GlyphPlacement>& out)
      : config_(config),
        out_(out),
        cols_(max_columns(config)),
        rows_(lines_per_page(config)) {}

  std::size_t columns() const { return cols_; }
  std::size_t used() const { return col_; }
  std::size_t room() const { return cols_ - col_; }

  void put(char32_t ch) {
    const std::size_t page = line_ / rows_;
    const std::size_t row = line_ % rows_;
    GlyphPlacement g;
    g.ch = ch;
    g.x = quantize(config_.geometry.margin_pt + static_cast<double>(col_) * config_.advance());
    g.y = quantize(first_baseline(config_) - static_cast<double>(row) * config_.line_height_pt);
    g.page = page;
    g.reading_index = out_.size();
    out_.push_back(g);
    ++col_;
  }

  void break_line() {
    ++line_;
    col_ = 0;
  }

 private:
  const LayoutConfig& config_;
  std::vector<GlyphPlacement>& out_;
  std::size_t cols_;
  std::size_t rows_;
  std::size_t line_ = 0;
  std::size_t col_ = 0;
};

void place_word(LineSink& sink, std::u32string_view word) {
  while (!word.empty()) {
    if (sink.room() == 0) sink.break_line();
    const std::size_t take = std::min(sink.room(), word.size());
    for (std::size_t i = 0; i < take; ++i) sink.put(word[i]);
    word.remove_prefix(take);
  }
}

void layout_paragraph(LineSink& sink, std::u32string_view para) {
  std::size_t i = 0;
  while (i < para.size()) {
    std::size_t spaces = 0;
    while (i < para.size() && para[i] == U' ') {
      ++spaces;
      ++i;
    }
    const std::size_t word_start = i;
    while (i < para.size() && para[i] != U' ') ++i;
    const std::u32string_view word = para.substr(word_start, i - word_start);

    if (word.empty()) {
      // Trailing spaces.
      if (spaces <= sink.room()) {
        for (std::size_t k = 0; k < spaces; ++k) sink.put(U' ');
      }
      break;
    }

    if (spaces + word.size() <= sink.room()) {
      for (std::size_t k = 0; k < spaces; ++k) sink.put(U' ');
      for (char32_t ch : word) sink.put(ch);
      continue;
    }
    // The spaces sit on a wrap boundary and are consumed.
    if (sink.used() > 0) sink.break_line();
    place_word(sink, word);
  }
}

}  // namespace

void validate(const LayoutConfig& c) {
  validate(c.geometry);
  validate(c.font);
  if (!(c.font_size_pt > 0.0) || !std::isfinite(c.font_size_pt)) {
    throw ConfigError("font size must be positive");
  }
  if (!(c.line_height_pt >= c.font_size_pt) || !std::isfinite(c.line_height_pt)) {
    throw ConfigError(fmt::format("line height {} pt is smaller than font size {} pt",
                                  c.line_height_pt, c.font_size_pt));
  }
  if (max_columns(c) == 0) throw ConfigError("usable page width holds no glyph");
  if (lines_per_page(c) == 0) throw ConfigError("usable page height holds no line");
}

std::size_t max_columns(const LayoutConfig& c) {
  const double usable = c.geometry.width_pt - 2.0 * c.geometry.margin_pt;
  if (!(usable > 0.0) || !(c.advance() > 0.0)) return 0;
  return static_cast<std::size_t>(std::floor(usable / c.advance() + kFloorSlack));
}

std::size_t lines_per_page(const LayoutConfig& c) {
  const double span = first_baseline(c) - c.geometry.margin_pt;
  if (span < 0.0 || !(c.line_height_pt > 0.0)) return 0;
  return static_cast<std::size_t>(std::floor(span / c.line_height_pt + kFloorSlack)) + 1;
}

std::size_t LayoutResult::page_count() const {
  std::size_t pages = 0;
  for (const auto& p : placements) pages = std::max(pages, p.page + 1);
  return pages;
}

LayoutResult layout_text(std::u32string_view raw, const LayoutConfig& config) {
  validate(config);
  for (std::size_t i = 0; i < raw.size(); ++i) {
    const char32_t ch = raw[i];
    if (ch != U'\n' && ch != U'\r' && !winansi::encodable(ch)) throw EncodingError(ch, i);
  }
  const std::u32string text = normalize_newlines(raw);

  LayoutResult result{{}, config};
  result.placements.reserve(text.size());
  LineSink sink(config, result.placements);

  std::size_t start = 0;
  while (start <= text.size()) {
    std::size_t end = text.find(U'\n', start);
    if (end == std::u32string::npos) end = text.size();
    layout_paragraph(sink, std::u32string_view(text).substr(start, end - start));
    if (end == text.size()) break;
    sink.break_line();
    start = end + 1;
  }
  return result;
}

LayoutResult layout_text(std::string_view utf8_text, const LayoutConfig& config) {
  return layout_text(utf8_to_u32(utf8_text), config);
}

std::u32string reference_sequence(std::span<const GlyphPlacement> placements) {
  std::vector<const GlyphPlacement*> ordered;
  ordered.reserve(placements.size());
  for (const auto& p : placements) ordered.push_back(&p);
  std::stable_sort(ordered.begin(), ordered.end(), [](const auto* a, const auto* b) {
    return a->reading_index < b->reading_index;
  });
  std::u32string out;
  out.reserve(ordered.size());
  for (const auto* p : ordered) out.push_back(p->ch);
  return out;
}

}  // namespace pdfuzz
