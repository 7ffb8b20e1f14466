#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "pdfuzz/layout.hpp"
#include "pdfuzz/types.hpp"

namespace pdfuzz {

struct CharLevel {
  std::uint64_t seed = 0;
  bool operator==(const CharLevel&) const = default;
};

struct ChunkLevel {
  std::uint64_t seed = 0;
  std::size_t min_chunk = 8;
  std::size_t max_chunk = 15;
  bool operator==(const ChunkLevel&) const = default;
};

using ScrambleStrategy = std::variant<CharLevel, ChunkLevel>;

// "char" or "chunk".
std::string strategy_name(const ScrambleStrategy& s);
std::uint64_t strategy_seed(const ScrambleStrategy& s);
// Same kind and parameters, different seed.
ScrambleStrategy with_seed(const ScrambleStrategy& s, std::uint64_t seed);
std::optional<ScrambleStrategy> parse_strategy(std::string_view name, std::uint64_t seed);

struct Permutation {
  // mapping[stream_position] = reading_index
  std::vector<std::size_t> mapping;
  ScrambleStrategy strategy;
  // ChunkLevel only: the partition of 0..n-1 into consecutive chunks, as
  // lengths in reading order. Empty for CharLevel.
  std::vector<std::size_t> chunk_lengths;

  std::size_t size() const { return mapping.size(); }
  bool is_identity() const;

  bool operator==(const Permutation&) const = default;
};

bool is_bijection(std::span<const std::size_t> mapping);

// CharLevel: Fisher-Yates over the identity (i from n-1 down to 1, swap i
// with below(i+1)).
// ChunkLevel: chunk lengths drawn with between(min, max) until n is covered
// (the last chunk is truncated), then the chunk order is shuffled with the
// same Fisher-Yates, continuing the same generator. Indices stay ascending
// inside a chunk.
//
// Throws ConfigError if ChunkLevel has min_chunk == 0 or min > max.
Permutation make_permutation(const ScrambleStrategy& strategy, std::size_t n);

// out[i] is the placement whose reading_index is perm.mapping[i]; every
// placement is copied unchanged. Throws ContractError on a size mismatch or
// when reading indices are not exactly 0..n-1.
std::vector<GlyphPlacement> apply_permutation(const Permutation& perm, std::span<const GlyphPlacement> placements);
inline std::vector<GlyphPlacement> apply_permutation(const Permutation& perm, const LayoutResult& result) {
  return apply_permutation(perm, result.placements);
}

// out[i] = s[perm.mapping[i]]
std::u32string permute(const Permutation& perm, std::u32string_view s);

// The order in which a writer that groups glyphs by page emits a stream-
// ordered list: stable partition by page. Identity for single-page input.
std::vector<GlyphPlacement> page_grouped(std::span<const GlyphPlacement> stream);

}  // namespace pdfuzz
