#include "pdfuzz/scrambler.hpp"

#include <algorithm>
#include <numeric>

#include <fmt/format.h>

#include "pdfuzz/errors.hpp"
#include "pdfuzz/random.hpp"

namespace pdfuzz {

namespace {

template <typename T>
void fisher_yates(std::vector<T>& v, SeededRng& rng) {
  for (std::size_t i = v.size(); i > 1; --i) {
    const std::size_t j = rng.below(i);
    std::swap(v[i - 1], v[j]);
  }
}

}  // namespace

std::string strategy_name(const ScrambleStrategy& s) {
  return std::holds_alternative<CharLevel>(s) ? "char" : "chunk";
}

std::uint64_t strategy_seed(const ScrambleStrategy& s) {
  return std::visit([](const auto& v) { return v.seed; }, s);
}

ScrambleStrategy with_seed(const ScrambleStrategy& s, std::uint64_t seed) {
  ScrambleStrategy out = s;
  std::visit([seed](auto& v) { v.seed = seed; }, out);
  return out;
}

std::optional<ScrambleStrategy> parse_strategy(std::string_view name, std::uint64_t seed) {
  if (name == "char") return CharLevel{seed};
  if (name == "chunk") return ChunkLevel{seed};
  return std::nullopt;
}

bool Permutation::is_identity() const {
  for (std::size_t i = 0; i < mapping.size(); ++i) {
    if (mapping[i] != i) return false;
  }
  return true;
}

bool is_bijection(std::span<const std::size_t> mapping) {
  std::vector<bool> seen(mapping.size(), false);
  for (std::size_t v : mapping) {
    if (v >= mapping.size() || seen[v]) return false;
    seen[v] = true;
  }
  return true;
}

Permutation make_permutation(const ScrambleStrategy& strategy, std::size_t n) {
  Permutation perm{{}, strategy, {}};
  perm.mapping.resize(n);
  std::iota(perm.mapping.begin(), perm.mapping.end(), std::size_t{0});

  if (const auto* c = std::get_if<CharLevel>(&strategy)) {
    SeededRng rng(c->seed);
    fisher_yates(perm.mapping, rng);
    return perm;
  }

  const auto& chunk = std::get<ChunkLevel>(strategy);
  if (chunk.min_chunk == 0 || chunk.min_chunk > chunk.max_chunk) {
    throw ConfigError(fmt::format("chunk bounds [{}, {}] are invalid", chunk.min_chunk,
                                  chunk.max_chunk));
  }
  if (n == 0) return perm;

  SeededRng rng(chunk.seed);
  std::vector<std::size_t> starts;
  for (std::size_t pos = 0; pos < n;) {
    const std::size_t len = std::min<std::size_t>(rng.between(chunk.min_chunk, chunk.max_chunk), n - pos);
    starts.push_back(pos);
    perm.chunk_lengths.push_back(len);
    pos += len;
  }

  std::vector<std::size_t> order(starts.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  fisher_yates(order, rng);

  std::size_t out = 0;
  for (std::size_t k : order) {
    for (std::size_t i = 0; i < perm.chunk_lengths[k]; ++i) perm.mapping[out++] = starts[k] + i;
  }
  return perm;
}

std::vector<GlyphPlacement> apply_permutation(const Permutation& perm,
                                  std::span<const GlyphPlacement> placements) {
  if (perm.size() != placements.size()) {
    throw ContractError(fmt::format("permutation of size {} applied to {} placements", perm.size(),
                                    placements.size()));
  }
  std::vector<const GlyphPlacement*> by_index(placements.size(), nullptr);
  for (const auto& p : placements) {
    if (p.reading_index >= by_index.size() || by_index[p.reading_index] != nullptr) {
      throw ContractError("placement reading indices are not a permutation of 0..n-1");
    }
    by_index[p.reading_index] = &p;
  }
  std::vector<GlyphPlacement> out;
  out.reserve(placements.size());
  for (std::size_t idx : perm.mapping) {
    if (idx >= by_index.size()) throw ContractError("permutation entry out of range");
    out.push_back(*by_index[idx]);
  }
  return out;
}

std::u32string permute(const Permutation& perm, std::u32string_view s) {
  if (perm.size() != s.size()) {
    throw ContractError(
        fmt::format("permutation of size {} applied to {} characters", perm.size(), s.size()));
  }
  std::u32string out(s.size(), U'\0');
  for (std::size_t i = 0; i < s.size(); ++i) out[i] = s[perm.mapping[i]];
  return out;
}

std::vector<GlyphPlacement> page_grouped(std::span<const GlyphPlacement> stream) {
  std::vector<GlyphPlacement> out(stream.begin(), stream.end());
  std::stable_sort(out.begin(), out.end(),
                   [](const auto& a, const auto& b) { return a.page < b.page; });
  return out;
}

}  // namespace pdfuzz
