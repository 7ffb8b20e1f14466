#include "pdfuzz/fidelity.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <map>
#include <numeric>
#include <tuple>
#include <unordered_map>

#include <fmt/format.h>

#include "pdfuzz/errors.hpp"

namespace pdfuzz {

namespace {

using GlyphKey = std::tuple<std::size_t, std::int64_t, std::int64_t, char32_t>;

std::int64_t bucket(double v, double eps) {
  if (eps > 0.0) return std::llround(v / eps);
  return std::bit_cast<std::int64_t>(v == 0.0 ? 0.0 : v);
}

std::uint64_t merge_count(std::vector<std::size_t>& v, std::vector<std::size_t>& tmp,
                          std::size_t lo, std::size_t hi) {
  if (hi - lo < 2) return 0;
  const std::size_t mid = lo + (hi - lo) / 2;
  std::uint64_t inv = merge_count(v, tmp, lo, mid) + merge_count(v, tmp, mid, hi);
  std::size_t i = lo, j = mid, k = lo;
  while (i < mid && j < hi) {
    if (v[j] < v[i]) {
      inv += mid - i;
      tmp[k++] = v[j++];
    } else {
      tmp[k++] = v[i++];
    }
  }
  while (i < mid) tmp[k++] = v[i++];
  while (j < hi) tmp[k++] = v[j++];
  std::copy(tmp.begin() + lo, tmp.begin() + hi, v.begin() + lo);
  return inv;
}

}  // namespace

FidelityReport visual_equivalence(std::span<const ExtractedGlyph> a,
                                  std::span<const ExtractedGlyph> b, double eps) {
  if (eps < 0.0 || !std::isfinite(eps)) throw ContractError("eps must be a finite value >= 0");

  struct Tally {
    long long balance = 0;  // count in a minus count in b
    const ExtractedGlyph* sample_a = nullptr;
    const ExtractedGlyph* sample_b = nullptr;
  };
  std::map<GlyphKey, Tally> tallies;
  for (const auto& g : a) {
    auto& t = tallies[{g.page, bucket(g.x, eps), bucket(g.y, eps), g.ch}];
    ++t.balance;
    if (t.sample_a == nullptr) t.sample_a = &g;
  }
  for (const auto& g : b) {
    auto& t = tallies[{g.page, bucket(g.x, eps), bucket(g.y, eps), g.ch}];
    --t.balance;
    if (t.sample_b == nullptr) t.sample_b = &g;
  }

  FidelityReport report;
  report.glyph_count_a = a.size();
  report.glyph_count_b = b.size();
  for (const auto& [key, t] : tallies) {
    if (t.balance == 0) continue;
    const ExtractedGlyph& g = t.balance > 0 ? *t.sample_a : *t.sample_b;
    const char doc = t.balance > 0 ? 'a' : 'b';
    for (long long k = 0; k < std::llabs(t.balance); ++k) {
      report.mismatches.push_back({g.ch, g.x, g.y, g.page, doc});
    }
  }
  report.visually_equal = report.mismatches.empty() && a.size() == b.size();
  return report;
}

std::uint64_t count_inversions(std::span<const std::size_t> v) {
  std::vector<std::size_t> work(v.begin(), v.end());
  std::vector<std::size_t> tmp(work.size());
  return merge_count(work, tmp, 0, work.size());
}

double normalized_kendall_tau(std::span<const std::size_t> mapping) {
  const std::size_t n = mapping.size();
  if (n < 2) return 0.0;
  const double pairs = static_cast<double>(n) * static_cast<double>(n - 1) / 2.0;
  return static_cast<double>(count_inversions(mapping)) / pairs;
}

std::vector<std::size_t> induced_alignment(std::u32string_view reference,
                                           std::u32string_view extracted) {
  std::unordered_map<char32_t, std::vector<std::size_t>> positions;
  for (std::size_t i = reference.size(); i-- > 0;) positions[reference[i]].push_back(i);
  std::vector<std::size_t> out;
  out.reserve(extracted.size());
  for (char32_t ch : extracted) {
    auto it = positions.find(ch);
    if (it == positions.end() || it->second.empty()) continue;
    out.push_back(it->second.back());
    it->second.pop_back();
  }
  return out;
}

std::size_t lcs_length(std::u32string_view a, std::u32string_view b, std::size_t cap) {
  a = a.substr(0, std::min(a.size(), cap));
  b = b.substr(0, std::min(b.size(), cap));
  if (a.empty() || b.empty()) return 0;
  std::vector<std::uint32_t> prev(b.size() + 1, 0), cur(b.size() + 1, 0);
  for (std::size_t i = 1; i <= a.size(); ++i) {
    const char32_t ca = a[i - 1];
    for (std::size_t j = 1; j <= b.size(); ++j) {
      cur[j] = ca == b[j - 1] ? prev[j - 1] + 1 : std::max(prev[j], cur[j - 1]);
    }
    std::swap(prev, cur);
  }
  return prev[b.size()];
}

bool same_multiset(std::u32string_view a, std::u32string_view b) {
  if (a.size() != b.size()) return false;
  std::u32string sa(a), sb(b);
  std::sort(sa.begin(), sa.end());
  std::sort(sb.begin(), sb.end());
  return sa == sb;
}

ScrambleMetrics scramble_metrics(std::u32string_view reference, const ExtractionResult& extracted,
                                 const Permutation* perm) {
  ScrambleMetrics m;
  if (perm != nullptr) {
    if (perm->size() != reference.size()) {
      throw ContractError(fmt::format("permutation of size {} for a reference of {} characters",
                                      perm->size(), reference.size()));
    }
    m.kendall_tau_norm = normalized_kendall_tau(perm->mapping);
  } else {
    m.kendall_tau_norm = normalized_kendall_tau(induced_alignment(reference, extracted.text));
  }
  if (reference.empty()) {
    m.lcs_ratio = 1.0;
  } else {
    const double denom = static_cast<double>(std::min(reference.size(), kLcsCap));
    m.lcs_ratio = static_cast<double>(lcs_length(reference, extracted.text)) / denom;
  }
  m.multiset_equal = same_multiset(reference, extracted.text);
  return m;
}

std::string verdict_name(Verdict v) {
  switch (v) {
    case Verdict::kClean: return "clean";
    case Verdict::kSuspicious: return "suspicious";
    case Verdict::kManipulated: return "manipulated";
  }
  return "unknown";
}

Verdict verdict_for(double score) {
  if (score < kSuspiciousThreshold) return Verdict::kClean;
  if (score < kManipulatedThreshold) return Verdict::kSuspicious;
  return Verdict::kManipulated;
}

std::vector<std::size_t> reading_ranks(std::span<const ExtractedGlyph> glyphs,
                                       const AuditOptions& options) {
  if (!(options.line_height_pt > 0.0)) throw ContractError("line height must be positive");
  const std::size_t n = glyphs.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::vector<std::int64_t> line(n);
  for (std::size_t i = 0; i < n; ++i) line[i] = std::llround(glyphs[i].y / options.line_height_pt);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t i, std::size_t j) {
    if (glyphs[i].page != glyphs[j].page) return glyphs[i].page < glyphs[j].page;
    if (line[i] != line[j]) return line[i] > line[j];
    return glyphs[i].x < glyphs[j].x;
  });
  std::vector<std::size_t> rank(n);
  for (std::size_t r = 0; r < n; ++r) rank[order[r]] = r;
  return rank;
}

AuditReport audit_order(std::span<const ExtractedGlyph> glyphs, const AuditOptions& options) {
  AuditReport report;
  report.n_glyphs = glyphs.size();
  if (glyphs.size() < 2) return report;

  const auto rank = reading_ranks(glyphs, options);
  std::size_t breaks = 0;
  std::size_t drops = 0;
  for (std::size_t i = 0; i + 1 < rank.size(); ++i) {
    if (rank[i + 1] != rank[i] + 1) ++breaks;
    if (rank[i + 1] < rank[i]) ++drops;
  }
  const double pairs = static_cast<double>(rank.size() - 1);
  report.anomaly_score = static_cast<double>(breaks) / pairs;
  report.descending_fraction = static_cast<double>(drops) / pairs;
  report.verdict = verdict_for(report.anomaly_score);
  return report;
}

}  // namespace pdfuzz
