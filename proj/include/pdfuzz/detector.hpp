#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"
#include "pdfuzz/corpus.hpp"
#include "pdfuzz/layout.hpp"
#include "pdfuzz/ngram.hpp"
#include "pdfuzz/scrambler.hpp"

namespace pdfuzz {

// Decision rule: perplexity < threshold => AI.
struct DetectorConfig {
  double threshold = 0.0;
  double calibration_accuracy = 0.0;
  // Set when the best achievable calibration accuracy is <= 0.5.
  bool warning = false;
};

inline bool predicts_ai(const DetectorConfig& config, double ppl) { return ppl < config.threshold; }

struct LabeledText {
  std::u32string text;
  Label label = Label::kHuman;
};

// Candidate thresholds are half the smallest score, the midpoints between
// adjacent distinct sorted scores, and the largest score plus one. The
// first (lowest) candidate with maximal accuracy wins. Throws ConfigError
// unless both labels are present and the inputs have equal length.
DetectorConfig calibrate_from_scores(std::span<const double> perplexities,
                                     std::span<const Label> labels);
DetectorConfig calibrate_threshold(const NgramModel& model, std::span<const LabeledText> labeled);

struct BinaryMetrics {
  std::size_t tp = 0, fp = 0, tn = 0, fn = 0;
  double accuracy = 0.0;
  double f1_ai = 0.0;  // AI is the positive class; 0 when tp == 0
};

BinaryMetrics binary_metrics(std::span<const Label> truth, std::span<const Label> predicted);

// TPR at the largest threshold t whose false-positive rate (humans with
// perplexity < t) does not exceed max_fpr: t is the (floor(max_fpr*H)+1)-th
// smallest human perplexity, or +inf when that exceeds H.
double tpr_at_fpr(std::span<const double> human_ppl, std::span<const double> ai_ppl,
                  double max_fpr = 0.01);

struct PipelineMetrics {
  BinaryMetrics binary;
  double tpr_at_1pct_fpr = 0.0;
};

struct DocResult {
  std::string id;
  Label label = Label::kHuman;
  double ppl_normal = 0.0;
  double ppl_attacked = 0.0;
  Label pred_normal = Label::kHuman;
  Label pred_attacked = Label::kHuman;
  double tau = 0.0;
  bool attacked = false;
  bool visually_equal = true;
};

struct ExtractedText {
  std::string id;
  Label label = Label::kHuman;
  std::string variant;  // "normal" or "attacked"
  std::u32string text;
};

struct EvalReport {
  PipelineMetrics normal;
  PipelineMetrics attacked;
  DetectorConfig config;
  std::optional<ScrambleStrategy> attack;
  std::vector<DocResult> per_doc;        // input order
  std::vector<ExtractedText> extracted;  // filled when EvalOptions::keep_texts
};

struct EvalOptions {
  std::size_t threads = 0;  // 0: hardware concurrency
  bool keep_texts = false;
};

// Each document is laid out, written as a normal PDF and (AI documents
// only) as an attacked PDF, extracted and scored. The attacked pipeline
// differs from the normal one only in the AI documents. Document i uses
// the strategy reseeded with derive_seed(strategy seed, i). With no attack,
// both pipelines are identical. A failing document aborts the run with an
// Error naming its id.
EvalReport evaluate_corpus(const NgramModel& model, const DetectorConfig& config,
                           std::span<const CorpusRecord> corpus,
                           const std::optional<ScrambleStrategy>& attack,
                           const LayoutConfig& layout, const EvalOptions& options = {});

inline constexpr int kReportSchemaVersion = 1;

nlohmann::ordered_json to_json(const EvalReport& report);

}  // namespace pdfuzz
