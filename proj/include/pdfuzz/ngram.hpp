#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <map>
#include <set>
#include <span>
#include <string>
#include <string_view>

namespace pdfuzz {

// Reserved symbols live just past the Unicode range.
inline constexpr char32_t kBoundarySymbol = 0x110000;
inline constexpr char32_t kUnknownSymbol = 0x110001;

inline constexpr std::size_t kDefaultOrder = 3;
inline constexpr double kDefaultAlpha = 1.0;

struct ContextCounts {
  std::uint64_t total = 0;
  std::map<char32_t, std::uint64_t> next;

  bool operator==(const ContextCounts&) const = default;
};

// Character n-gram counts with Laplace smoothing:
//
//   P(c | ctx) = (count(ctx, c) + alpha) / (total(ctx) + alpha * |V|)
//
// where V is the observed characters plus the boundary and unknown symbols.
class NgramModel {
 public:
  NgramModel(std::size_t order, double alpha);

  std::size_t order() const { return order_; }
  double alpha() const { return alpha_; }
  const std::set<char32_t>& vocab() const { return vocab_; }
  std::size_t vocab_size() const { return vocab_.size(); }
  const std::map<std::u32string, ContextCounts>& contexts() const { return contexts_; }

  // Characters outside the vocabulary (and reserved values) map to the
  // unknown symbol.
  char32_t symbol_for(char32_t ch) const;

  std::uint64_t count(std::u32string_view context, char32_t next) const;
  std::uint64_t context_total(std::u32string_view context) const;
  double probability(std::u32string_view context, char32_t next) const;

  void add_symbol(char32_t ch);
  void add_count(std::u32string context, char32_t next, std::uint64_t k = 1);

  bool operator==(const NgramModel&) const = default;

 private:
  std::size_t order_;
  double alpha_;
  std::set<char32_t> vocab_;
  std::map<std::u32string, ContextCounts> contexts_;
};

// Counts every n-gram of every text, padded with order-1 boundary symbols
// on the left and one boundary symbol on the right. Throws ConfigError for
// an empty corpus, order < 2 or alpha <= 0.
NgramModel train(std::span<const std::u32string> texts, std::size_t order = kDefaultOrder,
                 double alpha = kDefaultAlpha);

// exp(-(1/m) * sum log P(c_i | c_{i-n+1..i-1})) over the m characters of
// `text`, with left boundary padding and no end symbol. Throws
// ContractError for empty text.
double perplexity(const NgramModel& model, std::u32string_view text);

// Sharpened sampling: starting from the boundary context, each character is
// drawn with probability proportional to (count + alpha)^2 over the
// observed characters (reserved symbols are never emitted). The generator
// is SeededRng(seed); one unit() draw per character, scanning candidates
// in ascending code point order.
std::u32string sample(const NgramModel& model, std::size_t length, std::uint64_t seed);

// Text serialization; see docs/model-format.md. load_model throws
// ParseError (offset = line number) on malformed input.
void save_model(const NgramModel& model, std::ostream& out);
NgramModel load_model(std::istream& in);

}  // namespace pdfuzz
