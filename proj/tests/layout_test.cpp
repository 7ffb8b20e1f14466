#include <algorithm>
#include <cmath>
#include <map>
#include <string>
#include <vector>

#include <gtest/gtest.h>

#include "pdfuzz/encoding.hpp"
#include "pdfuzz/errors.hpp"
#include "pdfuzz/layout.hpp"
#include "test_util.hpp"

namespace pdfuzz {
namespace {

// Reference wrap written against strings: lines are built as text and
// compared with what the layouter placed.
std::vector<std::u32string> oracle_wrap(std::u32string_view text, std::size_t cols) {
  std::vector<std::u32string> lines(1);
  auto new_line = [&] { lines.emplace_back(); };
  std::size_t para_start = 0;
  for (;;) {
    const std::size_t nl = text.find(U'\n', para_start);
    const std::u32string_view para =
        text.substr(para_start, nl == std::u32string_view::npos ? std::u32string_view::npos
                                                                : nl - para_start);
    std::size_t i = 0;
    while (i < para.size()) {
      const std::size_t sp_begin = i;
      while (i < para.size() && para[i] == U' ') ++i;
      const std::u32string spaces(para.substr(sp_begin, i - sp_begin));
      const std::size_t w_begin = i;
      while (i < para.size() && para[i] != U' ') ++i;
      std::u32string word(para.substr(w_begin, i - w_begin));
      if (word.empty()) {
        if (lines.back().size() + spaces.size() <= cols) lines.back() += spaces;
        break;
      }
      if (lines.back().size() + spaces.size() + word.size() <= cols) {
        lines.back() += spaces + word;
        continue;
      }
      if (!lines.back().empty()) new_line();
      while (!word.empty()) {
        if (lines.back().size() == cols) new_line();
        const std::size_t take = std::min(cols - lines.back().size(), word.size());
        lines.back() += word.substr(0, take);
        word.erase(0, take);
      }
    }
    if (nl == std::u32string_view::npos) break;
    new_line();
    para_start = nl + 1;
  }
  return lines;
}

// Recovers the visual lines from placements: global line number from page
// and baseline, column from x.
std::vector<std::u32string> visual_lines(const LayoutResult& r) {
  const LayoutConfig& c = r.config;
  const std::size_t rows = lines_per_page(c);
  const double top = c.geometry.height_pt - c.geometry.margin_pt - c.font_size_pt;
  std::map<std::size_t, std::map<std::size_t, char32_t>> grid;
  for (const auto& p : r.placements) {
    const auto row = static_cast<std::size_t>(std::llround((top - p.y) / c.line_height_pt));
    const auto col =
        static_cast<std::size_t>(std::llround((p.x - c.geometry.margin_pt) / c.advance()));
    EXPECT_TRUE(grid[p.page * rows + row].emplace(col, p.ch).second) << "two glyphs in one cell";
  }
  std::vector<std::u32string> lines;
  for (const auto& [line, cells] : grid) {
    if (lines.size() <= line) lines.resize(line + 1);
    std::size_t expect_col = 0;
    for (const auto& [col, ch] : cells) {
      EXPECT_EQ(col, expect_col) << "gap in line " << line;
      expect_col = col + 1;
      lines[line].push_back(ch);
    }
  }
  return lines;
}

void expect_matches_oracle(const std::u32string& text, const LayoutConfig& config) {
  const auto result = layout_text(text, config);
  auto expected = oracle_wrap(text, max_columns(config));
  auto actual = visual_lines(result);
  // Trailing blank lines produce no placements and cannot be recovered.
  while (!expected.empty() && expected.back().empty()) expected.pop_back();
  ASSERT_LE(actual.size(), expected.size());
  actual.resize(expected.size());
  for (std::size_t i = 0; i < expected.size(); ++i) {
    ASSERT_EQ(u32_to_utf8(actual[i]), u32_to_utf8(expected[i])) << "line " << i;
  }
  std::u32string joined;
  for (const auto& l : expected) joined += l;
  EXPECT_EQ(reference_sequence(result), joined);
}

LayoutConfig config_with_columns(std::size_t cols) {
  LayoutConfig c;
  c.geometry.width_pt = 2 * c.geometry.margin_pt + static_cast<double>(cols) * c.advance();
  return c;
}

TEST(LayoutConfig, DefaultLetterGeometry) {
  const LayoutConfig c;
  EXPECT_EQ(max_columns(c), 65u);
  // First baseline at 708, last possible at >= 72: floor(636 / 14.4) + 1.
  EXPECT_EQ(lines_per_page(c), 45u);
}

TEST(LayoutConfig, ColumnsAreExactAtBoundary) {
  EXPECT_EQ(max_columns(config_with_columns(77)), 77u);
  EXPECT_EQ(config_with_columns(77).geometry.width_pt, 698.4);
}

TEST(LayoutConfig, RejectsDegenerateGeometry) {
  LayoutConfig c;
  c.geometry.width_pt = 150;
  EXPECT_THROW(layout_text(U"a", c), ConfigError);
  c = LayoutConfig{};
  c.line_height_pt = 10;
  EXPECT_THROW(layout_text(U"a", c), ConfigError);
  c = LayoutConfig{};
  c.font_size_pt = 0;
  EXPECT_THROW(layout_text(U"a", c), ConfigError);
  c = LayoutConfig{};
  c.geometry.height_pt = 150;
  EXPECT_THROW(layout_text(U"a", c), ConfigError);
}

TEST(LayoutText, EmptyInput) {
  const auto r = layout_text(U"", LayoutConfig{});
  EXPECT_TRUE(r.placements.empty());
  EXPECT_EQ(reference_sequence(r), U"");
  EXPECT_EQ(r.page_count(), 0u);
}

TEST(LayoutText, SpacesAreGlyphs) {
  const auto r = layout_text(U"hi there", LayoutConfig{});
  EXPECT_EQ(reference_sequence(r), U"hi there");
  ASSERT_EQ(r.placements.size(), 8u);
  for (std::size_t i = 0; i < 8; ++i) {
    EXPECT_EQ(r.placements[i].reading_index, i);
    EXPECT_EQ(r.placements[i].x, quantize(72.0 + 7.2 * static_cast<double>(i)));
    EXPECT_EQ(r.placements[i].y, 708.0);
    EXPECT_EQ(r.placements[i].page, 0u);
  }
}

TEST(LayoutText, NewlinesProduceNoGlyphs) {
  const auto r = layout_text(U"ab\ncd\r\nef\rg\n\nh", LayoutConfig{});
  EXPECT_EQ(reference_sequence(r), U"abcdefgh");
  std::vector<double> ys;
  for (const auto& p : r.placements) ys.push_back(p.y);
  const std::vector<double> expected = {708, 708, 693.6, 693.6, 679.2, 679.2, 664.8, 636};
  EXPECT_EQ(ys, expected);
}

TEST(LayoutText, Utf8Overload) {
  const auto r = layout_text(std::string_view("caf\xC3\xA9 \xE2\x80\x94 ok"), LayoutConfig{});
  EXPECT_EQ(reference_sequence(r), U"café — ok");
}

TEST(LayoutText, RejectsUnencodableWithPosition) {
  try {
    layout_text(U"ab\ncd中", LayoutConfig{});
    FAIL();
  } catch (const EncodingError& e) {
    EXPECT_EQ(e.character(), U'中');
    EXPECT_EQ(e.index(), 5u);
  }
}

TEST(LayoutText, ReadingIndicesAreDense) {
  SeededRng rng(1);
  const auto r = layout_text(testing::random_text(rng, 5000, true), LayoutConfig{});
  for (std::size_t i = 0; i < r.placements.size(); ++i) {
    EXPECT_EQ(r.placements[i].reading_index, i);
  }
}

TEST(LayoutText, CoordinatesAreQuantizedAndInsideMargins) {
  SeededRng rng(2);
  const LayoutConfig c;
  const auto r = layout_text(testing::random_text(rng, 8000, true), c);
  EXPECT_GT(r.page_count(), 1u);
  for (const auto& p : r.placements) {
    EXPECT_EQ(p.x, quantize(p.x));
    EXPECT_EQ(p.y, quantize(p.y));
    EXPECT_GE(p.x, c.geometry.margin_pt);
    EXPECT_LE(p.x + c.advance(), c.geometry.width_pt - c.geometry.margin_pt + 1e-9);
    EXPECT_GE(p.y, c.geometry.margin_pt);
    EXPECT_LE(p.y + c.font_size_pt, c.geometry.height_pt - c.geometry.margin_pt + 1e-9);
  }
}

TEST(LayoutText, ThousandCharParagraphMatchesOracle) {
  SeededRng rng(77);
  expect_matches_oracle(testing::random_text(rng, 1000, false), config_with_columns(77));
}

TEST(LayoutText, LongWordsAreHardSplit) {
  const std::u32string text = U"ab " + std::u32string(25, U'x') + U" cd";
  const auto r = layout_text(text, config_with_columns(10));
  const auto lines = visual_lines(r);
  const std::vector<std::u32string> expected = {U"ab", U"xxxxxxxxxx", U"xxxxxxxxxx", U"xxxxx cd"};
  EXPECT_EQ(lines, expected);
}

TEST(LayoutText, WrapConsumesSpaces) {
  const auto r = layout_text(U"aaaa   bbbb", config_with_columns(8));
  EXPECT_EQ(reference_sequence(r), U"aaaabbbb");
  const auto r2 = layout_text(U"aaaa bbbb  ", config_with_columns(9));
  EXPECT_EQ(reference_sequence(r2), U"aaaa bbbb");
}

TEST(LayoutText, RandomTextMatchesOracle) {
  SeededRng rng(99);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t cols = 1 + rng.below(30);
    const auto text = testing::random_text(rng, rng.below(600), true);
    SCOPED_TRACE(trial);
    expect_matches_oracle(text, config_with_columns(cols));
  }
}

TEST(LayoutText, OverflowStartsNewPage) {
  LayoutConfig c;
  std::u32string text;
  for (std::size_t i = 0; i < lines_per_page(c) + 1; ++i) text += U"line\n";
  const auto r = layout_text(text, c);
  EXPECT_EQ(r.page_count(), 2u);
  EXPECT_EQ(r.placements.back().page, 1u);
  EXPECT_EQ(r.placements.back().y, 708.0);
}

TEST(LayoutText, ConservesCharactersWithoutWrapping) {
  SeededRng rng(5);
  for (int trial = 0; trial < 100; ++trial) {
    std::u32string line = testing::random_text(rng, rng.below(65), false);
    auto ref = reference_sequence(layout_text(line, LayoutConfig{}));
    EXPECT_EQ(ref, line);
  }
}

TEST(LayoutText, ConservesMultisetMinusConsumedSpaces) {
  SeededRng rng(6);
  for (int trial = 0; trial < 100; ++trial) {
    const auto text = testing::random_text(rng, 2000, true);
    auto ref = reference_sequence(layout_text(text, LayoutConfig{}));
    std::u32string expected;
    for (char32_t ch : text) {
      if (ch != U'\n') expected.push_back(ch);
    }
    std::map<char32_t, long> diff;
    for (char32_t ch : expected) ++diff[ch];
    for (char32_t ch : ref) --diff[ch];
    for (const auto& [ch, d] : diff) {
      if (ch == U' ') {
        EXPECT_GE(d, 0);
      } else {
        EXPECT_EQ(d, 0) << static_cast<std::uint32_t>(ch);
      }
    }
  }
}

TEST(LayoutText, SingleLineLayoutIsIdempotent) {
  SeededRng rng(7);
  for (int trial = 0; trial < 50; ++trial) {
    const auto line = testing::random_text(rng, 1 + rng.below(60), false);
    const auto first = layout_text(line, LayoutConfig{});
    const auto second = layout_text(reference_sequence(first), LayoutConfig{});
    EXPECT_EQ(first.placements, second.placements);
  }
}

}  // namespace
}  // namespace pdfuzz
