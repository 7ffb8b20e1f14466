#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "pdfuzz/extractor.hpp"
#include "pdfuzz/scrambler.hpp"

namespace pdfuzz {

// Half the serialization quantum.
inline constexpr double kDefaultFidelityEps = 0.005;

struct Mismatch {
  char32_t ch = U' ';
  double x = 0.0;
  double y = 0.0;
  std::size_t page = 0;
  char document = 'a';  // 'a' or 'b': the document holding the surplus glyph
};

struct FidelityReport {
  bool visually_equal = false;
  std::vector<Mismatch> mismatches;
  std::size_t glyph_count_a = 0;
  std::size_t glyph_count_b = 0;
};

// Compares the two glyph multisets with coordinates bucketed to
// round(v / eps) (exact comparison when eps == 0). Stream order is ignored.
FidelityReport visual_equivalence(std::span<const ExtractedGlyph> a,
                                  std::span<const ExtractedGlyph> b,
                                  double eps = kDefaultFidelityEps);

struct ScrambleMetrics {
  double kendall_tau_norm = 0.0;
  double lcs_ratio = 1.0;
  bool multiset_equal = true;
};

// Number of pairs i < j with v[i] > v[j]; O(n log n).
std::uint64_t count_inversions(std::span<const std::size_t> v);

// Discordant pairs / C(n, 2); 0 for n < 2.
double normalized_kendall_tau(std::span<const std::size_t> mapping);

// For each character of `extracted`, the index of the earliest unused equal
// character of `reference`. Characters without a partner are skipped.
std::vector<std::size_t> induced_alignment(std::u32string_view reference,
                                           std::u32string_view extracted);

inline constexpr std::size_t kLcsCap = 20000;

// Classic O(n*m) dynamic program with two rolling rows. Both inputs are
// truncated to `cap` characters.
std::size_t lcs_length(std::u32string_view a, std::u32string_view b, std::size_t cap = kLcsCap);

bool same_multiset(std::u32string_view a, std::u32string_view b);

// tau from the permutation when given, otherwise from the induced alignment.
// lcs_ratio = LCS / min(|reference|, cap), 1 for an empty reference.
// Throws ContractError if perm->size() != reference.size().
ScrambleMetrics scramble_metrics(std::u32string_view reference, const ExtractionResult& extracted,
                                 const Permutation* perm = nullptr);

enum class Verdict { kClean, kSuspicious, kManipulated };

std::string verdict_name(Verdict v);

inline constexpr double kSuspiciousThreshold = 0.05;
inline constexpr double kManipulatedThreshold = 0.25;

Verdict verdict_for(double anomaly_score);

struct AuditOptions {
  // Baselines are bucketed as round(y / line_height_pt) before sorting.
  double line_height_pt = 14.4;
};

struct AuditReport {
  // Fraction of consecutive stream pairs whose reading rank does not
  // advance by exactly one.
  double anomaly_score = 0.0;
  // Fraction of consecutive stream pairs whose reading rank decreases.
  double descending_fraction = 0.0;
  Verdict verdict = Verdict::kClean;
  std::size_t n_glyphs = 0;
};

// Reading rank = position after sorting by (page, -line bucket, x); ties
// keep stream order.
std::vector<std::size_t> reading_ranks(std::span<const ExtractedGlyph> glyphs,
                                       const AuditOptions& options = {});

AuditReport audit_order(std::span<const ExtractedGlyph> glyphs, const AuditOptions& options = {});

}  // namespace pdfuzz
