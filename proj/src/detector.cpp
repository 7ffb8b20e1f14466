#include "pdfuzz/detector.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <limits>
#include <mutex>
#include <thread>

#include <fmt/format.h>

#include "pdfuzz/encoding.hpp"
#include "pdfuzz/errors.hpp"
#include "pdfuzz/extractor.hpp"
#include "pdfuzz/fidelity.hpp"
#include "pdfuzz/pdfmodel.hpp"
#include "pdfuzz/random.hpp"

namespace pdfuzz {

DetectorConfig calibrate_from_scores(std::span<const double> ppl, std::span<const Label> labels) {
  if (ppl.size() != labels.size()) throw ConfigError("scores and labels differ in length");
  const bool has_ai = std::find(labels.begin(), labels.end(), Label::kAi) != labels.end();
  const bool has_human = std::find(labels.begin(), labels.end(), Label::kHuman) != labels.end();
  if (!has_ai || !has_human) throw ConfigError("calibration needs both human and ai examples");

  std::vector<double> sorted(ppl.begin(), ppl.end());
  std::sort(sorted.begin(), sorted.end());
  sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());

  std::vector<double> candidates;
  candidates.push_back(sorted.front() / 2.0);
  for (std::size_t i = 0; i + 1 < sorted.size(); ++i) {
    candidates.push_back(sorted[i] + (sorted[i + 1] - sorted[i]) / 2.0);
  }
  candidates.push_back(sorted.back() + 1.0);

  DetectorConfig best;
  best.calibration_accuracy = -1.0;
  for (double t : candidates) {
    std::size_t correct = 0;
    for (std::size_t i = 0; i < ppl.size(); ++i) {
      const Label pred = ppl[i] < t ? Label::kAi : Label::kHuman;
      correct += pred == labels[i];
    }
    const double acc = static_cast<double>(correct) / static_cast<double>(ppl.size());
    if (acc > best.calibration_accuracy) {
      best.threshold = t;
      best.calibration_accuracy = acc;
    }
  }
  best.warning = best.calibration_accuracy <= 0.5;
  return best;
}

DetectorConfig calibrate_threshold(const NgramModel& model, std::span<const LabeledText> labeled) {
  std::vector<double> scores;
  std::vector<Label> labels;
  for (const auto& item : labeled) {
    scores.push_back(perplexity(model, item.text));
    labels.push_back(item.label);
  }
  return calibrate_from_scores(scores, labels);
}

BinaryMetrics binary_metrics(std::span<const Label> truth, std::span<const Label> predicted) {
  if (truth.size() != predicted.size()) throw ContractError("label vectors differ in length");
  BinaryMetrics m;
  for (std::size_t i = 0; i < truth.size(); ++i) {
    const bool actual_ai = truth[i] == Label::kAi;
    const bool pred_ai = predicted[i] == Label::kAi;
    if (actual_ai && pred_ai) ++m.tp;
    if (!actual_ai && pred_ai) ++m.fp;
    if (!actual_ai && !pred_ai) ++m.tn;
    if (actual_ai && !pred_ai) ++m.fn;
  }
  if (!truth.empty()) {
    m.accuracy = static_cast<double>(m.tp + m.tn) / static_cast<double>(truth.size());
  }
  if (m.tp > 0) {
    m.f1_ai = 2.0 * static_cast<double>(m.tp) / static_cast<double>(2 * m.tp + m.fp + m.fn);
  }
  return m;
}

double tpr_at_fpr(std::span<const double> human_ppl, std::span<const double> ai_ppl,
                  double max_fpr) {
  if (ai_ppl.empty()) return 0.0;
  std::vector<double> humans(human_ppl.begin(), human_ppl.end());
  std::sort(humans.begin(), humans.end());
  const auto allowed =
      static_cast<std::size_t>(std::floor(max_fpr * static_cast<double>(humans.size()) + 1e-9));
  const double threshold =
      allowed < humans.size() ? humans[allowed] : std::numeric_limits<double>::infinity();
  const auto hits = std::count_if(ai_ppl.begin(), ai_ppl.end(), [&](double p) { return p < threshold; });
  return static_cast<double>(hits) / static_cast<double>(ai_ppl.size());
}

namespace {

struct DocWork {
  DocResult result;
  std::u32string normal_text;
  std::u32string attacked_text;
};

DocWork run_document(const NgramModel& model, const DetectorConfig& config,
                     const CorpusRecord& record, std::size_t index,
                     const std::optional<ScrambleStrategy>& attack, const LayoutConfig& layout) {
  DocWork w;
  w.result.id = record.id;
  w.result.label = record.label;

  const LayoutResult laid = layout_text(record.text, layout);
  const std::u32string reference = reference_sequence(laid);
  const auto& g = layout.geometry;

  const std::string normal_pdf =
      serialize(blueprint_from_placements(laid.placements, g, layout.font, layout.font_size_pt));
  ExtractionResult normal = extract_text(normal_pdf, layout.font);
  if (normal.text != reference) throw Error("normal extraction differs from the reference sequence");
  w.result.ppl_normal = perplexity(model, normal.text);
  w.result.pred_normal = predicts_ai(config, w.result.ppl_normal) ? Label::kAi : Label::kHuman;

  if (attack && record.label == Label::kAi) {
    const auto strategy = with_seed(*attack, derive_seed(strategy_seed(*attack), index));
    const Permutation perm = make_permutation(strategy, laid.placements.size());
    const auto stream = apply_permutation(perm, laid);
    const std::string attacked_pdf =
        serialize(blueprint_from_placements(stream, g, layout.font, layout.font_size_pt));
    ExtractionResult attacked = extract_text(attacked_pdf, layout.font);
    w.result.attacked = true;
    w.result.tau = normalized_kendall_tau(perm.mapping);
    w.result.visually_equal = visual_equivalence(normal.glyphs, attacked.glyphs).visually_equal;
    w.result.ppl_attacked = perplexity(model, attacked.text);
    w.attacked_text = std::move(attacked.text);
  } else {
    w.result.ppl_attacked = w.result.ppl_normal;
    w.attacked_text = normal.text;
  }
  w.result.pred_attacked = predicts_ai(config, w.result.ppl_attacked) ? Label::kAi : Label::kHuman;
  w.normal_text = std::move(normal.text);
  return w;
}

PipelineMetrics pipeline_metrics(std::span<const DocResult> docs, bool attacked) {
  std::vector<Label> truth, pred;
  std::vector<double> human_ppl, ai_ppl;
  for (const auto& d : docs) {
    truth.push_back(d.label);
    pred.push_back(attacked ? d.pred_attacked : d.pred_normal);
    // False positives are always measured on the untouched human documents.
    if (d.label == Label::kHuman) {
      human_ppl.push_back(d.ppl_normal);
    } else {
      ai_ppl.push_back(attacked ? d.ppl_attacked : d.ppl_normal);
    }
  }
  PipelineMetrics m;
  m.binary = binary_metrics(truth, pred);
  m.tpr_at_1pct_fpr = tpr_at_fpr(human_ppl, ai_ppl, 0.01);
  return m;
}

}  // namespace

EvalReport evaluate_corpus(const NgramModel& model, const DetectorConfig& config,
                           std::span<const CorpusRecord> corpus,
                           const std::optional<ScrambleStrategy>& attack,
                           const LayoutConfig& layout, const EvalOptions& options) {
  if (corpus.empty()) throw ConfigError("evaluation corpus is empty");
  const bool has_ai = std::any_of(corpus.begin(), corpus.end(),
                                  [](const auto& r) { return r.label == Label::kAi; });
  const bool has_human = std::any_of(corpus.begin(), corpus.end(),
                                     [](const auto& r) { return r.label == Label::kHuman; });
  if (!has_ai || !has_human) throw ConfigError("evaluation corpus needs both labels");
  if (!(config.threshold > 0.0)) throw ConfigError("detector threshold must be positive");
  validate(layout);

  std::vector<DocWork> work(corpus.size());
  std::atomic<std::size_t> next{0};
  std::mutex error_mutex;
  std::optional<std::size_t> failed_index;
  std::string failed_message;

  auto worker = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= corpus.size()) return;
      try {
        work[i] = run_document(model, config, corpus[i], i, attack, layout);
      } catch (const std::exception& e) {
        std::lock_guard lock(error_mutex);
        if (!failed_index || i < *failed_index) {
          failed_index = i;
          failed_message = e.what();
        }
      }
    }
  };

  std::size_t threads = options.threads != 0 ? options.threads : std::thread::hardware_concurrency();
  threads = std::clamp<std::size_t>(threads, 1, corpus.size());
  std::vector<std::thread> pool;
  for (std::size_t t = 1; t < threads; ++t) pool.emplace_back(worker);
  worker();
  for (auto& th : pool) th.join();

  if (failed_index) {
    throw Error(fmt::format("document '{}': {}", corpus[*failed_index].id, failed_message));
  }

  EvalReport report;
  report.config = config;
  report.attack = attack;
  for (auto& w : work) {
    if (options.keep_texts) {
      report.extracted.push_back({w.result.id, w.result.label, "normal", w.normal_text});
      if (w.result.attacked) {
        report.extracted.push_back({w.result.id, w.result.label, "attacked", w.attacked_text});
      }
    }
    report.per_doc.push_back(std::move(w.result));
  }
  report.normal = pipeline_metrics(report.per_doc, false);
  report.attacked = pipeline_metrics(report.per_doc, true);
  return report;
}

namespace {

nlohmann::ordered_json to_json(const PipelineMetrics& m) {
  nlohmann::ordered_json j;
  j["accuracy"] = m.binary.accuracy;
  j["f1_ai"] = m.binary.f1_ai;
  j["tpr_at_1pct_fpr"] = m.tpr_at_1pct_fpr;
  j["confusion"] = {{"tp", m.binary.tp}, {"fp", m.binary.fp}, {"tn", m.binary.tn}, {"fn", m.binary.fn}};
  return j;
}

}  // namespace

nlohmann::ordered_json to_json(const EvalReport& report) {
  nlohmann::ordered_json j;
  j["schema_version"] = kReportSchemaVersion;
  if (report.attack) {
    j["attack"] = {{"strategy", strategy_name(*report.attack)},
                   {"seed", strategy_seed(*report.attack)}};
  } else {
    j["attack"] = nullptr;
  }
  j["detector"] = {{"threshold", report.config.threshold},
                   {"calibration_accuracy", report.config.calibration_accuracy},
                   {"warning", report.config.warning}};
  j["normal"] = to_json(report.normal);
  j["attacked"] = to_json(report.attacked);
  auto docs = nlohmann::ordered_json::array();
  for (const auto& d : report.per_doc) {
    nlohmann::ordered_json doc;
    doc["id"] = d.id;
    doc["label"] = label_name(d.label);
    doc["ppl_normal"] = d.ppl_normal;
    doc["ppl_attacked"] = d.ppl_attacked;
    doc["pred_normal"] = label_name(d.pred_normal);
    doc["pred_attacked"] = label_name(d.pred_attacked);
    doc["tau"] = d.tau;
    doc["attacked"] = d.attacked;
    doc["visually_equal"] = d.visually_equal;
    docs.push_back(std::move(doc));
  }
  j["per_doc"] = std::move(docs);
  return j;
}

}  // namespace pdfuzz
