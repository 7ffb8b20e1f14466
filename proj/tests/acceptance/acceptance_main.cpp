// Acceptance suite: one PASS/FAIL line per primary criterion. Exit status is
// nonzero when any criterion fails.

#include <algorithm>
#include <chrono>
#include <cstdint>
#include <cstdio>
#include <functional>
#include <string>
#include <vector>

#include <fmt/format.h>

#include "../test_util.hpp"
#include "pdfuzz/corpus.hpp"
#include "pdfuzz/detector.hpp"
#include "pdfuzz/encoding.hpp"
#include "pdfuzz/extractor.hpp"
#include "pdfuzz/fidelity.hpp"
#include "pdfuzz/layout.hpp"
#include "pdfuzz/ngram.hpp"
#include "pdfuzz/pdfmodel.hpp"
#include "pdfuzz/random.hpp"
#include "pdfuzz/scrambler.hpp"

namespace pdfuzz {
namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

struct Outcome {
  bool pass = false;
  std::string detail;
};

int g_failures = 0;

void report(const std::string& name, const Outcome& o) {
  if (!o.pass) ++g_failures;
  fmt::print("{} {}: {}\n", o.pass ? "PASS" : "FAIL", name, o.detail);
  std::fflush(stdout);
}

// Runs a criterion, turning an escaped exception into a FAIL line.
void run_criterion(const std::string& name, const std::function<Outcome()>& body) {
  try {
    report(name, body());
  } catch (const std::exception& e) {
    report(name, {false, fmt::format("exception: {}", e.what())});
  }
}

std::string render(std::span<const GlyphPlacement> placements, const LayoutConfig& layout) {
  return serialize(
      blueprint_from_placements(placements, layout.geometry, layout.font, layout.font_size_pt));
}

// Shared fixture: 100 essays of 200 to 5000 characters with their normal PDFs.
struct Document {
  LayoutResult layout;
  std::u32string reference;
  ExtractionResult normal;
};

constexpr std::size_t kDocs = 100;
constexpr std::uint64_t kSeed = 20240917;

std::vector<Document> make_documents() {
  const LayoutConfig config;
  SeededRng lengths(kSeed);
  std::vector<Document> docs;
  for (std::size_t i = 0; i < kDocs; ++i) {
    const std::size_t target = lengths.between(200, 5000);
    std::string essay = generate_essay(derive_seed(kSeed, i), target);
    essay.resize(target);  // the generator overshoots to a sentence end
    Document d;
    d.layout = layout_text(essay, config);
    d.reference = reference_sequence(d.layout);
    docs.push_back(std::move(d));
  }
  return docs;
}

bool same_multiset_sorted(std::u32string a, std::u32string b) {
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  return a == b;
}

std::uint64_t brute_force_inversions(std::span<const std::size_t> v) {
  std::uint64_t inv = 0;
  for (std::size_t i = 0; i < v.size(); ++i) {
    for (std::size_t j = i + 1; j < v.size(); ++j) inv += v[i] > v[j] ? 1 : 0;
  }
  return inv;
}

// Rebuilds the chunks from their lengths and checks that the mapping is a
// concatenation of those chunks, each used once with ascending indices.
// Every chunk but the final remainder must lie in [lo, hi].
bool chunk_structure_valid(const Permutation& perm, std::size_t lo, std::size_t hi,
                           bool* short_tail) {
  const std::size_t n = perm.mapping.size();
  std::vector<std::size_t> start_to_chunk(n + 1, SIZE_MAX);
  std::size_t pos = 0;
  for (std::size_t k = 0; k < perm.chunk_lengths.size(); ++k) {
    const std::size_t len = perm.chunk_lengths[k];
    const bool last = k + 1 == perm.chunk_lengths.size();
    if (len == 0 || len > hi || (!last && len < lo)) return false;
    if (last && len < lo) *short_tail = true;
    start_to_chunk[pos] = k;
    pos += len;
  }
  if (pos != n) return false;
  std::vector<bool> used(perm.chunk_lengths.size(), false);
  std::size_t p = 0;
  while (p < n) {
    const std::size_t s = perm.mapping[p];
    if (s >= n || start_to_chunk[s] == SIZE_MAX) return false;
    const std::size_t k = start_to_chunk[s];
    if (used[k]) return false;
    used[k] = true;
    for (std::size_t i = 0; i < perm.chunk_lengths[k]; ++i) {
      if (p + i >= n || perm.mapping[p + i] != s + i) return false;
    }
    p += perm.chunk_lengths[k];
  }
  return true;
}

Outcome round_trip(std::vector<Document>& docs) {
  const auto start = Clock::now();
  const LayoutConfig config;
  std::size_t ok = 0;
  for (auto& d : docs) {
    d.normal = extract_text(render(d.layout.placements, config));
    if (d.normal.text == d.reference) ++ok;
  }
  const double t = seconds_since(start);
  return {ok == docs.size() && t < 30.0,
          fmt::format("{}/{} exact, {:.2f} s (limit 30 s)", ok, docs.size(), t)};
}

void fidelity_and_content(const std::vector<Document>& docs) {
  const auto start = Clock::now();
  const LayoutConfig config;
  std::size_t cases = 0, equal = 0, preserved = 0;
  for (const auto& d : docs) {
    for (int kind = 0; kind < 2; ++kind) {
      for (std::uint64_t seed = 0; seed < 10; ++seed) {
        const ScrambleStrategy strategy =
            kind == 0 ? ScrambleStrategy{CharLevel{seed}} : ScrambleStrategy{ChunkLevel{seed}};
        const auto perm = make_permutation(strategy, d.layout.placements.size());
        const auto attacked = extract_text(render(apply_permutation(perm, d.layout.placements), config));
        ++cases;
        if (visual_equivalence(d.normal.glyphs, attacked.glyphs, 0.005).visually_equal) ++equal;
        if (same_multiset_sorted(attacked.text, d.reference)) ++preserved;
      }
    }
  }
  const double t = seconds_since(start);
  report("visual fidelity",
         {equal == 2000 && cases == 2000 && t < 120.0,
          fmt::format("{}/{} visually equal at eps 0.005 pt, {:.2f} s (limit 120 s)", equal, cases, t)});
  report("content preservation",
         {preserved == 2000 && cases == 2000,
          fmt::format("{}/{} attacked extractions keep the reference multiset", preserved, cases)});
}

Outcome scramble_strength() {
  constexpr std::size_t n = 1000;
  const double pairs = static_cast<double>(n) * (n - 1) / 2.0;
  double tau_sum = 0.0;
  std::size_t chunk_ok = 0, short_tails = 0;
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    const auto perm = make_permutation(CharLevel{seed}, n);
    tau_sum += static_cast<double>(brute_force_inversions(perm.mapping)) / pairs;
    bool short_tail = false;
    if (chunk_structure_valid(make_permutation(ChunkLevel{seed}, n), 8, 15, &short_tail)) ++chunk_ok;
    if (short_tail) ++short_tails;
  }
  const double mean_tau = tau_sum / 100.0;
  return {mean_tau >= 0.45 && mean_tau <= 0.55 && chunk_ok == 100,
          fmt::format("char mean tau {:.4f} (target [0.45, 0.55]); chunk structure valid {}/100 "
                      "({} seeds end with a remainder shorter than 8)",
                      mean_tau, chunk_ok, short_tails)};
}

void detector_and_divergence() {
  const auto start = Clock::now();
  SyntheticCorpusOptions options;  // 200 per group, 200 to 5000 characters
  options.seed = 42;
  const auto corpus = synthesize_corpus(options);
  const CorpusSplit split = split_corpus(corpus, 0.5);

  std::vector<std::u32string> train_texts;
  for (const auto& r : split.train_human) train_texts.push_back(utf8_to_u32(r.text));
  const NgramModel model = train(train_texts, options.order, options.alpha);

  const LayoutConfig layout;
  std::vector<LabeledText> calibration;
  for (const auto& r : split.calibration) {
    calibration.push_back({reference_sequence(layout_text(r.text, layout)), r.label});
  }
  const DetectorConfig config = calibrate_threshold(model, calibration);
  const EvalReport r =
      evaluate_corpus(model, config, split.evaluation, ScrambleStrategy{CharLevel{42}}, layout);
  const double t = seconds_since(start);

  std::size_t humans = 0, ais = 0, diverged = 0;
  for (const auto& d : r.per_doc) {
    if (d.label == Label::kHuman) {
      ++humans;
    } else {
      ++ais;
      if (d.ppl_attacked > d.ppl_normal) ++diverged;
    }
  }
  const auto& n = r.normal;
  const auto& a = r.attacked;
  const bool sizes_ok = humans == 200 && ais == 200;
  report("detector evasion",
         {sizes_ok && n.binary.accuracy >= 0.90 && n.binary.f1_ai >= 0.90 && a.binary.f1_ai <= 0.05 &&
              a.tpr_at_1pct_fpr <= 0.05 && t < 300.0,
          fmt::format("{} human + {} ai; normal accuracy {:.4f} f1_ai {:.4f}; attacked f1_ai {:.4f} "
                      "tpr@1%fpr {:.4f}; {:.2f} s (limit 300 s)",
                      humans, ais, n.binary.accuracy, n.binary.f1_ai, a.binary.f1_ai,
                      a.tpr_at_1pct_fpr, t)});
  const double frac = ais == 0 ? 0.0 : static_cast<double>(diverged) / static_cast<double>(ais);
  report("perplexity divergence",
         {ais == 200 && frac >= 0.95,
          fmt::format("{}/{} ai documents score higher perplexity when attacked ({:.1f}%, need 95%)",
                      diverged, ais, 100.0 * frac)});
}

Outcome audit_separation(const std::vector<Document>& docs) {
  const LayoutConfig config;
  std::size_t clean = 0, manipulated = 0, small = 0;
  for (std::size_t i = 0; i < docs.size(); ++i) {
    const auto& d = docs[i];
    if (d.normal.glyphs.size() < 100) ++small;
    if (audit_order(d.normal.glyphs).verdict == Verdict::kClean) ++clean;
    const auto perm = make_permutation(CharLevel{derive_seed(kSeed, 7000 + i)}, d.layout.placements.size());
    const auto attacked = extract_text(render(apply_permutation(perm, d.layout.placements), config));
    if (audit_order(attacked.glyphs).verdict == Verdict::kManipulated) ++manipulated;
  }
  return {clean == 100 && manipulated >= 99 && small == 0,
          fmt::format("clean {}/100 normal; manipulated {}/100 char-attacked (need 99); {} documents "
                      "under 100 glyphs",
                      clean, manipulated, small)};
}

bool glyphs_match_placements(const std::vector<ExtractedGlyph>& got,
                             std::span<const GlyphPlacement> placements) {
  const auto expected = page_grouped(placements);
  if (got.size() != expected.size()) return false;
  for (std::size_t i = 0; i < got.size(); ++i) {
    const auto& g = got[i];
    const auto& p = expected[i];
    if (g.ch != p.ch || g.x != p.x || g.y != p.y || g.page != p.page || g.stream_index != i) return false;
  }
  return true;
}

// Even trials use random operator lists (the in-memory interpretation is the
// oracle); odd trials use random placements (the placements are the oracle).
Outcome serializer_oracle() {
  SeededRng rng(kSeed ^ 0x5eed);
  std::size_t ok = 0;
  const FontSpec font;
  for (std::size_t trial = 0; trial < 1000; ++trial) {
    if (trial % 2 == 0) {
      const auto bp = testing::random_blueprint(rng);
      const auto pages = parse_document(serialize(bp));
      bool same = pages.size() == bp.ops_per_page.size();
      std::size_t index = 0;
      for (std::size_t p = 0; same && p < pages.size(); ++p) {
        const auto got = interpret(parse_content_stream(pages[p]), p, bp.font, index);
        const auto want = interpret(bp.ops_per_page[p], p, bp.font, index);
        same = got == want;
        index += got.size();
      }
      if (same) ++ok;
    } else {
      const std::size_t pages = 1 + rng.below(3);
      const auto placements = testing::random_placements(rng, rng.below(400), pages);
      const auto bp = blueprint_from_placements(placements, PageGeometry{}, font, 12.0);
      if (glyphs_match_placements(extract_text(serialize(bp), font).glyphs, placements)) ++ok;
    }
  }
  return {ok == 1000, fmt::format("{}/1000 blueprints reproduce their glyphs exactly", ok)};
}

}  // namespace
}  // namespace pdfuzz

int main() {
  using namespace pdfuzz;
  const auto start = Clock::now();
  std::vector<Document> docs;
  try {
    docs = make_documents();
  } catch (const std::exception& e) {
    fmt::print("FAIL setup: {}\n", e.what());
    return 1;
  }
  run_criterion("round-trip extraction", [&] { return round_trip(docs); });
  try {
    fidelity_and_content(docs);
  } catch (const std::exception& e) {
    report("visual fidelity", {false, fmt::format("exception: {}", e.what())});
    report("content preservation", {false, "not run"});
  }
  run_criterion("scramble strength", scramble_strength);
  try {
    detector_and_divergence();
  } catch (const std::exception& e) {
    report("detector evasion", {false, fmt::format("exception: {}", e.what())});
    report("perplexity divergence", {false, "not run"});
  }
  run_criterion("audit separation", [&] { return audit_separation(docs); });
  run_criterion("serializer/parser oracle", serializer_oracle);
  fmt::print("{} criteria failed; total {:.1f} s\n", g_failures, seconds_since(start));
  return g_failures == 0 ? 0 : 1;
}
