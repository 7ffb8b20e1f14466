#include "pdfuzz/cli.hpp"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <optional>
#include <ostream>
#include <sstream>

#include <fmt/format.h>

#include "CLI11.hpp"
#include "json.hpp"
#include "pdfuzz/corpus.hpp"
#include "pdfuzz/detector.hpp"
#include "pdfuzz/encoding.hpp"
#include "pdfuzz/errors.hpp"
#include "pdfuzz/extractor.hpp"
#include "pdfuzz/fidelity.hpp"
#include "pdfuzz/layout.hpp"
#include "pdfuzz/ngram.hpp"
#include "pdfuzz/pdfmodel.hpp"
#include "pdfuzz/scrambler.hpp"

namespace pdfuzz::cli {

namespace {

constexpr std::uint64_t kFallbackSeed = 42;

std::uint64_t default_seed() {
  if (const char* env = std::getenv("PDFUZZ_SEED")) {
    char* end = nullptr;
    const unsigned long long v = std::strtoull(env, &end, 10);
    if (end != env && *end == '\0') return v;
  }
  return kFallbackSeed;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError(fmt::format("cannot open '{}'", path));
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void write_file(const std::string& path, std::string_view bytes) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError(fmt::format("cannot write '{}'", path));
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw ConfigError(fmt::format("failed writing '{}'", path));
}

void add_layout_flags(CLI::App* cmd, LayoutConfig& layout) {
  cmd->add_option("--page-width", layout.geometry.width_pt, "Page width in points")
      ->capture_default_str();
  cmd->add_option("--page-height", layout.geometry.height_pt, "Page height in points")
      ->capture_default_str();
  cmd->add_option("--margin", layout.geometry.margin_pt, "Page margin in points")
      ->capture_default_str();
  cmd->add_option("--font-size", layout.font_size_pt, "Font size in points")->capture_default_str();
  cmd->add_option("--line-height", layout.line_height_pt, "Baseline distance in points")
      ->capture_default_str();
}

std::string pdf_for(std::span<const GlyphPlacement> stream, const LayoutConfig& layout) {
  return serialize(
      blueprint_from_placements(stream, layout.geometry, layout.font, layout.font_size_pt));
}

std::string glyph_dump(const ExtractionResult& r) {
  std::string out;
  for (const auto& g : r.glyphs) {
    out += fmt::format("{} {} {} {}\n", g.page, format_number(g.x), format_number(g.y),
                       u32_to_utf8(g.ch));
  }
  return out;
}

nlohmann::ordered_json fidelity_json(const FidelityReport& r) {
  nlohmann::ordered_json j;
  j["schema_version"] = kSchemaVersion;
  j["visually_equal"] = r.visually_equal;
  j["glyph_count_a"] = r.glyph_count_a;
  j["glyph_count_b"] = r.glyph_count_b;
  auto list = nlohmann::ordered_json::array();
  for (const auto& m : r.mismatches) {
    list.push_back({{"document", std::string(1, m.document)},
                    {"page", m.page},
                    {"x", format_number(m.x)},
                    {"y", format_number(m.y)},
                    {"char", u32_to_utf8(m.ch)}});
  }
  j["mismatches"] = std::move(list);
  return j;
}

nlohmann::ordered_json audit_json(const AuditReport& r) {
  nlohmann::ordered_json j;
  j["schema_version"] = kSchemaVersion;
  j["anomaly_score"] = r.anomaly_score;
  j["descending_fraction"] = r.descending_fraction;
  j["verdict"] = verdict_name(r.verdict);
  j["n_glyphs"] = r.n_glyphs;
  return j;
}

nlohmann::ordered_json permutation_json(const Permutation& p) {
  nlohmann::ordered_json j;
  j["schema_version"] = kSchemaVersion;
  j["strategy"] = strategy_name(p.strategy);
  j["seed"] = strategy_seed(p.strategy);
  j["n"] = p.size();
  j["mapping"] = p.mapping;
  if (const auto* chunk = std::get_if<ChunkLevel>(&p.strategy)) {
    j["min_chunk"] = chunk->min_chunk;
    j["max_chunk"] = chunk->max_chunk;
    j["chunk_lengths"] = p.chunk_lengths;
  }
  return j;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Extraction-order scrambling toolkit for PDF text", "pdfuzz"};
  app.require_subcommand(1);

  LayoutConfig layout;
  std::string in_path, out_path, text_out, glyphs_out, perm_out, a_path, b_path;
  std::string strategy_text = "char";
  std::uint64_t seed = default_seed();
  double eps = kDefaultFidelityEps;
  AuditOptions audit_options;

  auto* generate = app.add_subcommand("generate", "Write the normal PDF of a text file");
  generate->add_option("--in", in_path, "UTF-8 text file")->required();
  generate->add_option("--out", out_path, "Output PDF")->required();
  add_layout_flags(generate, layout);

  auto* attack = app.add_subcommand("attack", "Write a PDF whose stream order is scrambled");
  attack->add_option("--in", in_path, "UTF-8 text file")->required();
  attack->add_option("--out", out_path, "Output PDF")->required();
  attack->add_option("--strategy", strategy_text, "char or chunk")
      ->check(CLI::IsMember({"char", "chunk"}))
      ->capture_default_str();
  attack->add_option("--seed", seed, "Permutation seed (default: $PDFUZZ_SEED or 42)");
  attack->add_option("--perm-out", perm_out, "Permutation sidecar (default: <out>.perm.json)");
  add_layout_flags(attack, layout);

  auto* extract = app.add_subcommand("extract", "Extract text in content-stream order");
  extract->add_option("--in", in_path, "Input PDF")->required();
  extract->add_option("--text", text_out, "Write stream-order text here (default: stdout)");
  extract->add_option("--glyphs", glyphs_out, "Write 'page x y char' glyph records here");

  auto* verify = app.add_subcommand("verify", "Check that two PDFs place identical glyphs");
  verify->add_option("--a", a_path, "First PDF")->required();
  verify->add_option("--b", b_path, "Second PDF")->required();
  verify->add_option("--eps", eps, "Coordinate bucket in points")->capture_default_str();

  auto* audit = app.add_subcommand("audit", "Score how far stream order departs from reading order");
  audit->add_option("--in", in_path, "Input PDF")->required();
  audit->add_option("--line-height", audit_options.line_height_pt, "Baseline bucket in points")
      ->capture_default_str();

  double train_split = 0.5;
  std::size_t order = kDefaultOrder;
  double alpha = kDefaultAlpha;
  std::size_t threads = 0;
  std::string extracted_out, model_out;
  auto* evaluate = app.add_subcommand("evaluate", "Run the detector before and after the attack");
  evaluate->add_option("--corpus", in_path, "JSONL corpus (id, label, text)")->required();
  evaluate->add_option("--strategy", strategy_text, "char or chunk")
      ->check(CLI::IsMember({"char", "chunk"}))
      ->capture_default_str();
  evaluate->add_option("--seed", seed, "Attack seed (default: $PDFUZZ_SEED or 42)");
  evaluate->add_option("--train-split", train_split, "Per-label fraction used for training")
      ->capture_default_str();
  evaluate->add_option("--out", out_path, "EvalReport JSON")->required();
  evaluate->add_option("--extracted-out", extracted_out, "JSONL of extracted texts for rescoring");
  evaluate->add_option("--model-out", model_out, "Save the trained n-gram model");
  evaluate->add_option("--order", order, "n-gram order")->capture_default_str();
  evaluate->add_option("--alpha", alpha, "Laplace smoothing constant")->capture_default_str();
  evaluate->add_option("--threads", threads, "Worker threads (0 = all cores)");
  add_layout_flags(evaluate, layout);

  SyntheticCorpusOptions synth_options;
  auto* synth = app.add_subcommand("synth-corpus", "Write the synthetic human/ai corpus");
  synth->add_option("--out", out_path, "Output JSONL")->required();
  synth->add_option("--seed", synth_options.seed, "Corpus seed")->capture_default_str();
  synth->add_option("--human-train", synth_options.human_train)->capture_default_str();
  synth->add_option("--human-eval", synth_options.human_eval)->capture_default_str();
  synth->add_option("--ai-calibration", synth_options.ai_calibration)->capture_default_str();
  synth->add_option("--ai-eval", synth_options.ai_eval)->capture_default_str();
  synth->add_option("--min-chars", synth_options.min_chars)->capture_default_str();
  synth->add_option("--max-chars", synth_options.max_chars)->capture_default_str();

  std::vector<std::string> argv_storage{"pdfuzz"};
  argv_storage.insert(argv_storage.end(), args.begin(), args.end());
  std::vector<const char*> argv;
  for (const auto& a : argv_storage) argv.push_back(a.c_str());

  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "pdfuzz: " << e.what() << '\n';
    return kExitError;
  }

  try {
    if (generate->parsed()) {
      const LayoutResult laid = layout_text(read_file(in_path), layout);
      write_file(out_path, pdf_for(laid.placements, layout));
      return kExitOk;
    }

    if (attack->parsed()) {
      const LayoutResult laid = layout_text(read_file(in_path), layout);
      const auto strategy = parse_strategy(strategy_text, seed);
      const Permutation perm = make_permutation(*strategy, laid.placements.size());
      write_file(out_path, pdf_for(apply_permutation(perm, laid), layout));
      write_file(perm_out.empty() ? out_path + ".perm.json" : perm_out,
                 permutation_json(perm).dump() + "\n");
      return kExitOk;
    }

    if (extract->parsed()) {
      const ExtractionResult result = extract_text(read_file(in_path));
      const std::string text = u32_to_utf8(result.text);
      if (!text_out.empty()) {
        write_file(text_out, text);
      } else if (glyphs_out.empty()) {
        out << text << '\n';
      }
      if (!glyphs_out.empty()) write_file(glyphs_out, glyph_dump(result));
      return kExitOk;
    }

    if (verify->parsed()) {
      const ExtractionResult a = extract_text(read_file(a_path));
      const ExtractionResult b = extract_text(read_file(b_path));
      const FidelityReport report = visual_equivalence(a.glyphs, b.glyphs, eps);
      out << fidelity_json(report).dump(2) << '\n';
      return report.visually_equal ? kExitOk : kExitNegative;
    }

    if (audit->parsed()) {
      const ExtractionResult r = extract_text(read_file(in_path));
      const AuditReport report = audit_order(r.glyphs, audit_options);
      out << audit_json(report).dump(2) << '\n';
      switch (report.verdict) {
        case Verdict::kClean: return kExitOk;
        case Verdict::kSuspicious: return kExitNegative;
        case Verdict::kManipulated: return kExitError;
      }
    }

    if (evaluate->parsed()) {
      std::ifstream corpus_in(in_path);
      if (!corpus_in) throw ConfigError(fmt::format("cannot open '{}'", in_path));
      const auto records = read_corpus_jsonl(corpus_in);
      const CorpusSplit split = split_corpus(records, train_split);
      validate(layout);

      std::vector<std::u32string> train_texts;
      for (const auto& r : split.train_human) train_texts.push_back(utf8_to_u32(r.text));
      const NgramModel model = train(train_texts, order, alpha);

      // The threshold is fitted on what the extractor returns for normal
      // PDFs, which is the layout's reference sequence.
      std::vector<LabeledText> calibration;
      for (const auto& r : split.calibration) {
        calibration.push_back({reference_sequence(layout_text(r.text, layout)), r.label});
      }
      const DetectorConfig config = calibrate_threshold(model, calibration);
      if (config.warning) {
        err << fmt::format("pdfuzz: warning: calibration accuracy is only {:.3f}\n",
                           config.calibration_accuracy);
      }

      EvalOptions options;
      options.threads = threads;
      options.keep_texts = !extracted_out.empty();
      const EvalReport report = evaluate_corpus(model, config, split.evaluation,
                                                parse_strategy(strategy_text, seed), layout, options);
      write_file(out_path, to_json(report).dump(2) + "\n");

      if (!extracted_out.empty()) {
        std::string lines;
        for (const auto& e : report.extracted) {
          nlohmann::ordered_json j;
          j["schema_version"] = kSchemaVersion;
          j["id"] = e.id;
          j["label"] = label_name(e.label);
          j["variant"] = e.variant;
          j["text"] = u32_to_utf8(e.text);
          lines += j.dump() + "\n";
        }
        write_file(extracted_out, lines);
      }
      if (!model_out.empty()) {
        std::ostringstream ms;
        save_model(model, ms);
        write_file(model_out, ms.str());
      }

      out << fmt::format("threshold        {:.4f} (calibration accuracy {:.3f})\n", config.threshold,
                         config.calibration_accuracy);
      out << fmt::format("normal    accuracy {:.3f}  f1_ai {:.3f}  tpr@1%fpr {:.3f}\n",
                         report.normal.binary.accuracy, report.normal.binary.f1_ai,
                         report.normal.tpr_at_1pct_fpr);
      out << fmt::format("attacked  accuracy {:.3f}  f1_ai {:.3f}  tpr@1%fpr {:.3f}\n",
                         report.attacked.binary.accuracy, report.attacked.binary.f1_ai,
                         report.attacked.tpr_at_1pct_fpr);
      return kExitOk;
    }

    if (synth->parsed()) {
      std::ostringstream os;
      write_corpus_jsonl(os, synthesize_corpus(synth_options));
      write_file(out_path, os.str());
      return kExitOk;
    }
  } catch (const EncodingError& e) {
    err << "pdfuzz: " << e.what() << '\n';
    return kExitError;
  } catch (const Error& e) {
    err << "pdfuzz: " << e.what() << '\n';
    return kExitError;
  } catch (const std::exception& e) {
    err << "pdfuzz: " << e.what() << '\n';
    return kExitError;
  }
  return kExitError;
}

}  // namespace pdfuzz::cli
