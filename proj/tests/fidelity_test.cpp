#include <algorithm>
#include <map>
#include <string>
#include <vector>

#include <gtest/gtest.h>

#include "pdfuzz/errors.hpp"
#include "pdfuzz/extractor.hpp"
#include "pdfuzz/fidelity.hpp"
#include "pdfuzz/layout.hpp"
#include "pdfuzz/pdfmodel.hpp"
#include "pdfuzz/scrambler.hpp"
#include "test_util.hpp"

namespace pdfuzz {
namespace {

using Mapping = std::vector<std::size_t>;

std::uint64_t brute_inversions(const Mapping& v) {
  std::uint64_t n = 0;
  for (std::size_t i = 0; i < v.size(); ++i) {
    for (std::size_t j = i + 1; j < v.size(); ++j) n += v[i] > v[j];
  }
  return n;
}

// Full-table LCS, written independently of the rolling-row version.
std::size_t brute_lcs(const std::u32string& a, const std::u32string& b) {
  std::vector<std::vector<std::size_t>> t(a.size() + 1, std::vector<std::size_t>(b.size() + 1, 0));
  for (std::size_t i = a.size(); i-- > 0;) {
    for (std::size_t j = b.size(); j-- > 0;) {
      t[i][j] = a[i] == b[j] ? 1 + t[i + 1][j + 1] : std::max(t[i + 1][j], t[i][j + 1]);
    }
  }
  return t[0][0];
}

ExtractionResult render_and_extract(const std::vector<GlyphPlacement>& stream,
                                    const LayoutConfig& c = {}) {
  return extract_text(
      serialize(blueprint_from_placements(stream, c.geometry, c.font, c.font_size_pt)));
}

struct Fixture {
  LayoutResult layout;
  ExtractionResult normal;
};

Fixture make_fixture(std::uint64_t seed, std::size_t n, bool newlines = true) {
  SeededRng rng(seed);
  Fixture f;
  f.layout = layout_text(testing::random_text(rng, n, newlines), LayoutConfig{});
  f.normal = render_and_extract(f.layout.placements);
  return f;
}

TEST(VisualEquivalence, SelfComparison) {
  const auto f = make_fixture(1, 3000);
  const auto r = visual_equivalence(f.normal.glyphs, f.normal.glyphs);
  EXPECT_TRUE(r.visually_equal);
  EXPECT_TRUE(r.mismatches.empty());
  EXPECT_EQ(r.glyph_count_a, r.glyph_count_b);
}

TEST(VisualEquivalence, NormalVersusAttacked) {
  const auto f = make_fixture(2, 3000);
  for (const ScrambleStrategy s : {ScrambleStrategy(CharLevel{4}), ScrambleStrategy(ChunkLevel{4})}) {
    const auto attacked = render_and_extract(
        apply_permutation(make_permutation(s, f.layout.placements.size()), f.layout));
    const auto r = visual_equivalence(f.normal.glyphs, attacked.glyphs);
    EXPECT_TRUE(r.visually_equal) << strategy_name(s);
    EXPECT_NE(attacked.text, f.normal.text);
    EXPECT_TRUE(visual_equivalence(f.normal.glyphs, attacked.glyphs, 0.0).visually_equal);
  }
}

TEST(VisualEquivalence, MovedGlyphGivesTwoMismatches) {
  const auto f = make_fixture(3, 500, false);
  auto moved = f.layout.placements;
  moved[17].x += 1.0;
  const auto attacked = render_and_extract(moved);
  const auto r = visual_equivalence(f.normal.glyphs, attacked.glyphs);
  EXPECT_FALSE(r.visually_equal);
  ASSERT_EQ(r.mismatches.size(), 2u);
  std::map<char, const Mismatch*> by_doc;
  for (const auto& m : r.mismatches) by_doc[m.document] = &m;
  ASSERT_TRUE(by_doc.count('a') && by_doc.count('b'));
  EXPECT_EQ(by_doc['a']->ch, f.layout.placements[17].ch);
  EXPECT_DOUBLE_EQ(by_doc['a']->x, f.layout.placements[17].x);
  EXPECT_DOUBLE_EQ(by_doc['b']->x, f.layout.placements[17].x + 1.0);
}

TEST(VisualEquivalence, CountDifferenceAndCharacterSwap) {
  const auto f = make_fixture(4, 200, false);
  auto fewer = f.normal.glyphs;
  fewer.pop_back();
  auto r = visual_equivalence(f.normal.glyphs, fewer);
  EXPECT_FALSE(r.visually_equal);
  EXPECT_EQ(r.mismatches.size(), 1u);
  EXPECT_EQ(r.glyph_count_a, fewer.size() + 1);

  auto swapped = f.normal.glyphs;
  swapped[0].ch = swapped[0].ch == U'Q' ? U'R' : U'Q';
  r = visual_equivalence(f.normal.glyphs, swapped);
  EXPECT_EQ(r.mismatches.size(), 2u);
}

TEST(VisualEquivalence, EpsilonBuckets) {
  std::vector<ExtractedGlyph> a = {{U'a', 72.0, 700.0, 0, 0}};
  std::vector<ExtractedGlyph> b = {{U'a', 72.001, 700.0, 0, 0}};
  EXPECT_TRUE(visual_equivalence(a, b).visually_equal);
  EXPECT_FALSE(visual_equivalence(a, b, 0.0).visually_equal);
  b[0].x = 72.01;
  EXPECT_FALSE(visual_equivalence(a, b).visually_equal);
  b[0].x = 72.0;
  b[0].page = 1;
  EXPECT_FALSE(visual_equivalence(a, b).visually_equal);
}

TEST(VisualEquivalence, EmptyDocuments) {
  EXPECT_TRUE(visual_equivalence({}, {}).visually_equal);
}

TEST(KendallTau, TrivialCases) {
  EXPECT_EQ(normalized_kendall_tau(Mapping{}), 0.0);
  EXPECT_EQ(normalized_kendall_tau(Mapping{0}), 0.0);
  EXPECT_EQ(normalized_kendall_tau(Mapping{0, 1, 2, 3}), 0.0);
  EXPECT_EQ(normalized_kendall_tau(Mapping{2, 1, 0}), 1.0);
  EXPECT_DOUBLE_EQ(normalized_kendall_tau(Mapping{1, 0, 2}), 1.0 / 3.0);
}

TEST(KendallTau, MatchesBruteForce) {
  SeededRng rng(5);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n = rng.below(300);
    const auto m = make_permutation(CharLevel{rng.next()}, n).mapping;
    EXPECT_EQ(count_inversions(m), brute_inversions(m));
  }
  const auto m = make_permutation(CharLevel{42}, 500).mapping;
  EXPECT_DOUBLE_EQ(normalized_kendall_tau(m),
                   static_cast<double>(brute_inversions(m)) / (500.0 * 499.0 / 2.0));
}

TEST(KendallTau, CountsTiesAsConcordant) {
  EXPECT_EQ(count_inversions(Mapping{1, 1, 0, 0}), 4u);
  EXPECT_EQ(count_inversions(Mapping{3, 3, 3}), 0u);
}

TEST(InducedAlignment, EarliestUnusedMatch) {
  EXPECT_EQ(induced_alignment(U"abca", U"aacb"), (Mapping{0, 3, 2, 1}));
  EXPECT_EQ(induced_alignment(U"abc", U"xcz"), (Mapping{2}));
}

TEST(Lcs, SmallCases) {
  EXPECT_EQ(lcs_length(U"", U"abc"), 0u);
  EXPECT_EQ(lcs_length(U"abc", U"abc"), 3u);
  EXPECT_EQ(lcs_length(U"abcbdab", U"bdcaba"), 4u);
}

TEST(Lcs, MatchesFullTable) {
  SeededRng rng(6);
  for (int trial = 0; trial < 100; ++trial) {
    std::u32string a, b;
    const auto alpha = 2 + rng.below(5);
    for (std::size_t i = rng.below(80); i > 0; --i) a.push_back(U'a' + rng.below(alpha));
    for (std::size_t i = rng.below(80); i > 0; --i) b.push_back(U'a' + rng.below(alpha));
    EXPECT_EQ(lcs_length(a, b), brute_lcs(a, b));
  }
}

TEST(Lcs, CapTruncatesBothInputs) {
  EXPECT_EQ(lcs_length(U"abcdef", U"abcxyz", 2), 2u);
  EXPECT_EQ(lcs_length(U"xxab", U"abxx", 2), 0u);
}

TEST(SameMultiset, Cases) {
  EXPECT_TRUE(same_multiset(U"abca", U"caab"));
  EXPECT_FALSE(same_multiset(U"abca", U"cabb"));
  EXPECT_FALSE(same_multiset(U"ab", U"abb"));
}

TEST(ScrambleMetrics, Identity) {
  const auto f = make_fixture(7, 1000);
  const auto ref = reference_sequence(f.layout);
  const auto perm = make_permutation(CharLevel{1}, 0);
  const Permutation id{[&] {
    Mapping m(ref.size());
    for (std::size_t i = 0; i < m.size(); ++i) m[i] = i;
    return m;
  }(), CharLevel{}, {}};
  for (const Permutation* p : {&id, static_cast<const Permutation*>(nullptr)}) {
    const auto m = scramble_metrics(ref, f.normal, p);
    EXPECT_EQ(m.kendall_tau_norm, 0.0);
    EXPECT_EQ(m.lcs_ratio, 1.0);
    EXPECT_TRUE(m.multiset_equal);
  }
  EXPECT_THROW(scramble_metrics(ref, f.normal, &perm), ContractError);
}

TEST(ScrambleMetrics, ReversalOfThree) {
  ExtractionResult r;
  r.text = U"cba";
  const Permutation rev{{2, 1, 0}, CharLevel{}, {}};
  const auto m = scramble_metrics(U"abc", r, &rev);
  EXPECT_EQ(m.kendall_tau_norm, 1.0);
  EXPECT_DOUBLE_EQ(m.lcs_ratio, 1.0 / 3.0);
  EXPECT_EQ(scramble_metrics(U"abc", r).kendall_tau_norm, 1.0);
}

TEST(ScrambleMetrics, AttackedDocumentBounds) {
  const auto f = make_fixture(8, 2000, false);
  const auto ref = reference_sequence(f.layout);
  const auto perm = make_permutation(CharLevel{42}, ref.size());
  const auto attacked = render_and_extract(apply_permutation(perm, f.layout));
  const auto m = scramble_metrics(ref, attacked, &perm);
  EXPECT_TRUE(m.multiset_equal);
  EXPECT_GT(m.kendall_tau_norm, 0.4);
  EXPECT_LT(m.kendall_tau_norm, 0.6);
  EXPECT_GT(m.lcs_ratio, 0.0);
  EXPECT_LT(m.lcs_ratio, 0.9);
  EXPECT_EQ(m.lcs_ratio, static_cast<double>(lcs_length(ref, attacked.text)) / ref.size());
}

TEST(Verdict, Thresholds) {
  EXPECT_EQ(verdict_for(0.0), Verdict::kClean);
  EXPECT_EQ(verdict_for(0.0499), Verdict::kClean);
  EXPECT_EQ(verdict_for(0.05), Verdict::kSuspicious);
  EXPECT_EQ(verdict_for(0.2499), Verdict::kSuspicious);
  EXPECT_EQ(verdict_for(0.25), Verdict::kManipulated);
  EXPECT_EQ(verdict_for(1.0), Verdict::kManipulated);
  EXPECT_EQ(verdict_name(Verdict::kClean), "clean");
  EXPECT_EQ(verdict_name(Verdict::kSuspicious), "suspicious");
  EXPECT_EQ(verdict_name(Verdict::kManipulated), "manipulated");
}

TEST(Audit, EmptyAndSingleGlyph) {
  auto r = audit_order({});
  EXPECT_EQ(r.anomaly_score, 0.0);
  EXPECT_EQ(r.verdict, Verdict::kClean);
  EXPECT_EQ(r.n_glyphs, 0u);
  const std::vector<ExtractedGlyph> one = {{U'a', 72, 700, 0, 0}};
  r = audit_order(one);
  EXPECT_EQ(r.anomaly_score, 0.0);
  EXPECT_EQ(r.n_glyphs, 1u);
}

TEST(Audit, ReadingRanks) {
  const std::vector<ExtractedGlyph> g = {
      {U'c', 72, 686, 0, 0}, {U'b', 80, 700, 0, 1}, {U'd', 72, 700, 1, 2}, {U'a', 72, 700.3, 0, 3}};
  EXPECT_EQ(reading_ranks(g), (Mapping{2, 1, 3, 0}));
}

TEST(Audit, NormalDocumentsAreClean) {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const auto f = make_fixture(100 + seed, 4000);
    const auto r = audit_order(f.normal.glyphs);
    EXPECT_EQ(r.anomaly_score, 0.0);
    EXPECT_EQ(r.descending_fraction, 0.0);
    EXPECT_EQ(r.verdict, Verdict::kClean);
  }
}

TEST(Audit, CharAttackIsManipulated) {
  const auto f = make_fixture(9, 1000, false);
  double descending = 0;
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    const auto attacked = render_and_extract(
        apply_permutation(make_permutation(CharLevel{seed}, f.layout.placements.size()), f.layout));
    const auto r = audit_order(attacked.glyphs);
    EXPECT_GT(r.anomaly_score, 0.25);
    EXPECT_EQ(r.verdict, Verdict::kManipulated);
    descending += r.descending_fraction;
  }
  EXPECT_NEAR(descending / 100, 0.5, 0.02);
}

TEST(Audit, ChunkAttackExceedsSuspiciousThreshold) {
  const auto f = make_fixture(10, 1000, false);
  int flagged = 0;
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    const auto attacked = render_and_extract(
        apply_permutation(make_permutation(ChunkLevel{seed}, f.layout.placements.size()), f.layout));
    flagged += audit_order(attacked.glyphs).anomaly_score > 0.05;
  }
  EXPECT_GE(flagged, 99);
}

TEST(Audit, AnomalyScoreMatchesRankOracle) {
  const auto f = make_fixture(11, 700, false);
  const auto perm = make_permutation(ChunkLevel{3}, f.layout.placements.size());
  const auto attacked = render_and_extract(apply_permutation(perm, f.layout));
  // Single page, so the reading rank of stream position i is perm.mapping[i].
  ASSERT_EQ(f.layout.page_count(), 1u);
  EXPECT_EQ(reading_ranks(attacked.glyphs), perm.mapping);
  std::size_t breaks = 0, drops = 0;
  for (std::size_t i = 0; i + 1 < perm.size(); ++i) {
    breaks += perm.mapping[i + 1] != perm.mapping[i] + 1;
    drops += perm.mapping[i + 1] < perm.mapping[i];
  }
  const auto r = audit_order(attacked.glyphs);
  EXPECT_DOUBLE_EQ(r.anomaly_score, static_cast<double>(breaks) / (perm.size() - 1));
  EXPECT_DOUBLE_EQ(r.descending_fraction, static_cast<double>(drops) / (perm.size() - 1));
}

TEST(Audit, LineHeightOption) {
  // One point apart: the same line at 14.4 pt buckets, two lines at 1 pt.
  const std::vector<ExtractedGlyph> g = {{U'b', 80, 700, 0, 0}, {U'a', 72, 699, 0, 1}};
  EXPECT_EQ(reading_ranks(g), (Mapping{1, 0}));
  EXPECT_EQ(reading_ranks(g, AuditOptions{1.0}), (Mapping{0, 1}));
}

}  // namespace
}  // namespace pdfuzz
