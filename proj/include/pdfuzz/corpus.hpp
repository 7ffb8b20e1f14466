#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace pdfuzz {

enum class Label { kHuman, kAi };

std::string label_name(Label label);  // "human" / "ai"
std::optional<Label> parse_label(std::string_view name);

struct CorpusRecord {
  std::string id;
  Label label = Label::kHuman;
  std::string text;  // UTF-8

  bool operator==(const CorpusRecord&) const = default;
};

// One JSON object per line: {"id": ..., "label": "human"|"ai", "text": ...}.
// Blank lines are ignored. Throws ParseError (offset = 1-based line number)
// for malformed lines, duplicate ids or empty texts.
std::vector<CorpusRecord> read_corpus_jsonl(std::istream& in);
void write_corpus_jsonl(std::ostream& out, std::span<const CorpusRecord> records);

// Argumentative essay prose built from a phrase grammar; stands in for
// human-written essays. Grows sentence by sentence until at least
// `target_chars` characters, with paragraph breaks as '\n'.
std::string generate_essay(std::uint64_t seed, std::size_t target_chars);

struct SyntheticCorpusOptions {
  std::size_t human_train = 200;
  std::size_t human_eval = 200;
  std::size_t ai_calibration = 200;
  std::size_t ai_eval = 200;
  std::size_t min_chars = 200;
  std::size_t max_chars = 5000;
  std::size_t order = 3;
  double alpha = 1.0;
  std::uint64_t seed = 42;
};

// Human essays followed by AI samples. The AI class is sampled from an
// n-gram model trained on the first `human_train` human essays, so that
// `split_corpus` with the matching fraction reproduces that model.
// Record order: human train, human eval, ai calibration, ai eval.
std::vector<CorpusRecord> synthesize_corpus(const SyntheticCorpusOptions& options);

struct CorpusSplit {
  std::vector<CorpusRecord> train_human;  // n-gram training texts
  std::vector<CorpusRecord> calibration;  // train_human + leading ai records
  std::vector<CorpusRecord> evaluation;   // everything else, input order
};

// Per label, the first round(fraction * count) records (in file order) go
// to training/calibration. Throws ConfigError if either label is missing
// from the input, the fraction is outside (0, 1), or a side ends up empty.
CorpusSplit split_corpus(std::span<const CorpusRecord> records, double train_fraction);

}  // namespace pdfuzz
