#include "pdfuzz/ngram.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <istream>
#include <ostream>
#include <sstream>
#include <vector>

#include <fmt/format.h>

#include "pdfuzz/errors.hpp"
#include "pdfuzz/random.hpp"

namespace pdfuzz {

namespace {

constexpr auto kLine = ParseError::Unit::kLine;

constexpr std::string_view kMagic = "PDFUZZ-NGRAM";
constexpr int kFormatVersion = 1;

std::u32string boundary_context(std::size_t order) {
  return std::u32string(order - 1, kBoundarySymbol);
}

void shift(std::u32string& ctx, char32_t sym) {
  if (ctx.empty()) return;
  ctx.erase(ctx.begin());
  ctx.push_back(sym);
}

std::string hex_symbol(char32_t s) { return fmt::format("{:x}", static_cast<std::uint32_t>(s)); }

}  // namespace

NgramModel::NgramModel(std::size_t order, double alpha) : order_(order), alpha_(alpha) {
  if (order < 2) throw ConfigError(fmt::format("n-gram order must be >= 2, got {}", order));
  if (!(alpha > 0.0) || !std::isfinite(alpha)) {
    throw ConfigError("smoothing constant alpha must be positive");
  }
  vocab_.insert(kBoundarySymbol);
  vocab_.insert(kUnknownSymbol);
}

char32_t NgramModel::symbol_for(char32_t ch) const {
  if (ch >= kBoundarySymbol) return kUnknownSymbol;
  return vocab_.contains(ch) ? ch : kUnknownSymbol;
}

std::uint64_t NgramModel::count(std::u32string_view context, char32_t next) const {
  auto it = contexts_.find(std::u32string(context));
  if (it == contexts_.end()) return 0;
  auto jt = it->second.next.find(next);
  return jt == it->second.next.end() ? 0 : jt->second;
}

std::uint64_t NgramModel::context_total(std::u32string_view context) const {
  auto it = contexts_.find(std::u32string(context));
  return it == contexts_.end() ? 0 : it->second.total;
}

double NgramModel::probability(std::u32string_view context, char32_t next) const {
  const double v = static_cast<double>(vocab_.size());
  return (static_cast<double>(count(context, next)) + alpha_) /
         (static_cast<double>(context_total(context)) + alpha_ * v);
}

void NgramModel::add_symbol(char32_t ch) { vocab_.insert(ch); }

void NgramModel::add_count(std::u32string context, char32_t next, std::uint64_t k) {
  auto& c = contexts_[std::move(context)];
  c.total += k;
  c.next[next] += k;
}

NgramModel train(std::span<const std::u32string> texts, std::size_t order, double alpha) {
  if (texts.empty()) throw ConfigError("cannot train on an empty corpus");
  NgramModel model(order, alpha);
  for (const auto& text : texts) {
    for (char32_t ch : text) {
      if (ch >= kBoundarySymbol) throw ConfigError("training text contains a reserved symbol");
      model.add_symbol(ch);
    }
  }
  for (const auto& text : texts) {
    std::u32string ctx = boundary_context(order);
    for (char32_t ch : text) {
      model.add_count(ctx, ch);
      shift(ctx, ch);
    }
    model.add_count(ctx, kBoundarySymbol);
  }
  return model;
}

double perplexity(const NgramModel& model, std::u32string_view text) {
  if (text.empty()) throw ContractError("perplexity of an empty text is undefined");
  std::u32string ctx = boundary_context(model.order());
  double log_sum = 0.0;
  for (char32_t raw : text) {
    const char32_t sym = model.symbol_for(raw);
    log_sum += std::log(model.probability(ctx, sym));
    shift(ctx, sym);
  }
  return std::exp(-log_sum / static_cast<double>(text.size()));
}

std::u32string sample(const NgramModel& model, std::size_t length, std::uint64_t seed) {
  std::vector<char32_t> candidates;
  for (char32_t s : model.vocab()) {
    if (s < kBoundarySymbol) candidates.push_back(s);
  }
  std::u32string out;
  if (length == 0 || candidates.empty()) return out;
  out.reserve(length);

  SeededRng rng(seed);
  std::u32string ctx = boundary_context(model.order());
  std::vector<double> weights(candidates.size());
  const double alpha = model.alpha();
  while (out.size() < length) {
    const auto it = model.contexts().find(ctx);
    double total = 0.0;
    for (std::size_t i = 0; i < candidates.size(); ++i) {
      double c = alpha;
      if (it != model.contexts().end()) {
        auto jt = it->second.next.find(candidates[i]);
        if (jt != it->second.next.end()) c += static_cast<double>(jt->second);
      }
      weights[i] = c * c;
      total += weights[i];
    }
    const double target = rng.unit() * total;
    std::size_t pick = candidates.size() - 1;
    double acc = 0.0;
    for (std::size_t i = 0; i < candidates.size(); ++i) {
      acc += weights[i];
      if (target < acc) {
        pick = i;
        break;
      }
    }
    out.push_back(candidates[pick]);
    shift(ctx, candidates[pick]);
  }
  return out;
}

void save_model(const NgramModel& model, std::ostream& out) {
  char alpha[64];
  std::snprintf(alpha, sizeof alpha, "%.17g", model.alpha());
  out << kMagic << ' ' << kFormatVersion << '\n';
  out << "order " << model.order() << '\n';
  out << "alpha " << alpha << '\n';
  out << "vocab " << model.vocab().size();
  for (char32_t s : model.vocab()) out << ' ' << hex_symbol(s);
  out << '\n';
  out << "contexts " << model.contexts().size() << '\n';
  for (const auto& [ctx, counts] : model.contexts()) {
    for (std::size_t i = 0; i < ctx.size(); ++i) out << (i ? "," : "") << hex_symbol(ctx[i]);
    out << ' ' << counts.total << ' ' << counts.next.size();
    for (const auto& [sym, k] : counts.next) out << ' ' << hex_symbol(sym) << ':' << k;
    out << '\n';
  }
  out << "end\n";
}

namespace {

char32_t parse_symbol(std::string_view s, std::size_t line) {
  if (s.empty() || s.size() > 8) throw ParseError("bad symbol", line, kLine);
  std::uint32_t v = 0;
  for (char c : s) {
    int d = 0;
    if (c >= '0' && c <= '9') {
      d = c - '0';
    } else if (c >= 'a' && c <= 'f') {
      d = c - 'a' + 10;
    } else {
      throw ParseError(fmt::format("bad symbol '{}'", s), line, kLine);
    }
    v = v * 16 + static_cast<std::uint32_t>(d);
  }
  if (v > kUnknownSymbol) throw ParseError(fmt::format("symbol '{}' out of range", s), line, kLine);
  return v;
}

std::uint64_t parse_count(std::string_view s, std::size_t line) {
  if (s.empty()) throw ParseError("missing count", line, kLine);
  std::uint64_t v = 0;
  for (char c : s) {
    if (c < '0' || c > '9') throw ParseError(fmt::format("bad count '{}'", s), line, kLine);
    v = v * 10 + static_cast<std::uint64_t>(c - '0');
  }
  return v;
}

}  // namespace

NgramModel load_model(std::istream& in) {
  std::string line;
  std::size_t line_no = 0;
  auto next_line = [&]() -> std::istringstream {
    if (!std::getline(in, line)) throw ParseError("unexpected end of model file", line_no + 1, kLine);
    ++line_no;
    return std::istringstream(line);
  };
  auto expect_key = [&](std::istringstream& ls, std::string_view key) {
    std::string word;
    if (!(ls >> word) || word != key) {
      throw ParseError(fmt::format("expected '{}'", key), line_no, kLine);
    }
  };

  {
    auto ls = next_line();
    std::string magic;
    int version = 0;
    if (!(ls >> magic >> version) || magic != kMagic) throw ParseError("not a pdfuzz model file", 1, kLine);
    if (version != kFormatVersion) {
      throw ParseError(fmt::format("unsupported model format version {}", version), 1, kLine);
    }
  }
  std::size_t order = 0;
  double alpha = 0.0;
  {
    auto ls = next_line();
    expect_key(ls, "order");
    if (!(ls >> order)) throw ParseError("bad order", line_no, kLine);
  }
  {
    auto ls = next_line();
    expect_key(ls, "alpha");
    std::string text;
    if (!(ls >> text)) throw ParseError("bad alpha", line_no, kLine);
    char* end = nullptr;
    alpha = std::strtod(text.c_str(), &end);
    if (end != text.c_str() + text.size() || !(alpha > 0.0) || !std::isfinite(alpha)) {
      throw ParseError("alpha must be a positive number", line_no, kLine);
    }
  }
  if (order < 2) throw ParseError("order must be at least 2", 2, kLine);
  NgramModel model(order, alpha);
  {
    auto ls = next_line();
    expect_key(ls, "vocab");
    std::size_t n = 0;
    if (!(ls >> n)) throw ParseError("bad vocab size", line_no, kLine);
    for (std::size_t i = 0; i < n; ++i) {
      std::string s;
      if (!(ls >> s)) throw ParseError("vocab shorter than declared", line_no, kLine);
      model.add_symbol(parse_symbol(s, line_no));
    }
    if (model.vocab_size() != n) throw ParseError("vocab size mismatch", line_no, kLine);
  }
  std::size_t n_contexts = 0;
  {
    auto ls = next_line();
    expect_key(ls, "contexts");
    if (!(ls >> n_contexts)) throw ParseError("bad context count", line_no, kLine);
  }
  for (std::size_t c = 0; c < n_contexts; ++c) {
    auto ls = next_line();
    std::string ctx_text;
    std::uint64_t total = 0;
    std::size_t entries = 0;
    if (!(ls >> ctx_text >> total >> entries)) throw ParseError("bad context line", line_no, kLine);
    std::u32string ctx;
    std::size_t start = 0;
    while (start <= ctx_text.size()) {
      const std::size_t comma = std::min(ctx_text.find(',', start), ctx_text.size());
      ctx.push_back(parse_symbol(std::string_view(ctx_text).substr(start, comma - start), line_no));
      start = comma + 1;
    }
    if (ctx.size() != order - 1) throw ParseError("context length does not match order", line_no, kLine);
    std::uint64_t sum = 0;
    for (std::size_t e = 0; e < entries; ++e) {
      std::string pair;
      if (!(ls >> pair)) throw ParseError("context line shorter than declared", line_no, kLine);
      const auto colon = pair.find(':');
      if (colon == std::string::npos) throw ParseError("bad count entry", line_no, kLine);
      const char32_t sym = parse_symbol(std::string_view(pair).substr(0, colon), line_no);
      const std::uint64_t k = parse_count(std::string_view(pair).substr(colon + 1), line_no);
      model.add_count(ctx, sym, k);
      sum += k;
    }
    if (sum != total) throw ParseError("context total does not match its counts", line_no, kLine);
  }
  {
    auto ls = next_line();
    expect_key(ls, "end");
  }
  return model;
}

}  // namespace pdfuzz
