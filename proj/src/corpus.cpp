#include "pdfuzz/corpus.hpp"

#include <array>
#include <cctype>
#include <cmath>
#include <istream>
#include <ostream>
#include <set>

#include <fmt/format.h>

#include "json.hpp"
#include "pdfuzz/encoding.hpp"
#include "pdfuzz/errors.hpp"
#include "pdfuzz/ngram.hpp"
#include "pdfuzz/random.hpp"

namespace pdfuzz {

std::string label_name(Label label) { return label == Label::kAi ? "ai" : "human"; }

std::optional<Label> parse_label(std::string_view name) {
  if (name == "human") return Label::kHuman;
  if (name == "ai") return Label::kAi;
  return std::nullopt;
}

std::vector<CorpusRecord> read_corpus_jsonl(std::istream& in) {
  std::vector<CorpusRecord> out;
  constexpr auto kLine = ParseError::Unit::kLine;
  std::set<std::string> ids;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(line);
    } catch (const nlohmann::json::exception& e) {
      throw ParseError(fmt::format("invalid JSON: {}", e.what()), line_no, kLine);
    }
    if (!j.is_object() || !j.contains("id") || !j.contains("label") || !j.contains("text") ||
        !j["id"].is_string() || !j["label"].is_string() || !j["text"].is_string()) {
      throw ParseError("expected string fields id, label, text", line_no, kLine);
    }
    CorpusRecord r;
    r.id = j["id"].get<std::string>();
    auto label = parse_label(j["label"].get<std::string>());
    if (!label) {
      throw ParseError("label must be \"human\" or \"ai\"", line_no, kLine);
    }
    r.label = *label;
    r.text = j["text"].get<std::string>();
    if (r.text.empty()) throw ParseError("empty text", line_no, kLine);
    if (!ids.insert(r.id).second) {
      throw ParseError(fmt::format("duplicate id '{}'", r.id), line_no, kLine);
    }
    out.push_back(std::move(r));
  }
  return out;
}

void write_corpus_jsonl(std::ostream& out, std::span<const CorpusRecord> records) {
  for (const auto& r : records) {
    nlohmann::ordered_json j;
    j["id"] = r.id;
    j["label"] = label_name(r.label);
    j["text"] = r.text;
    out << j.dump() << '\n';
  }
}

namespace {

using Bank = std::span<const std::string_view>;

constexpr std::array<std::string_view, 40> kTopics = {
    "online education", "public transport", "social media", "remote work",
    "school uniforms", "nuclear energy", "space exploration", "fast food advertising",
    "homework", "museums", "city parks", "standardized testing",
    "team sports", "video games", "tourism", "recycling programs",
    "the four-day week", "smartphones in class", "local newspapers", "urban gardens",
    "electric cars", "public libraries", "gap years", "volunteer work",
    "foreign languages", "student loans", "zoos", "tipping culture",
    "daylight saving time", "reality television", "plastic bags", "art classes",
    "cycling lanes", "boarding schools", "youth curfews", "organic farming",
    "self-driving taxis", "music streaming", "field trips", "pocket money",
};

constexpr std::array<std::string_view, 36> kActors = {
    "many teachers", "my grandmother", "most parents", "a neighbour of mine",
    "some economists", "critics", "local officials", "younger students",
    "older workers", "shop owners", "nurses I have met", "my cousin Maria",
    "engineers", "farmers in my region", "the school principal", "small businesses",
    "people in rural towns", "commuters", "librarians", "coaches",
    "first-year students", "taxpayers", "historians", "city planners",
    "our physics teacher", "retired soldiers", "journalists", "doctors",
    "immigrant families", "bus drivers", "my best friend", "skeptics",
    "elderly voters", "students abroad", "factory workers", "volunteers",
};

constexpr std::array<std::string_view, 40> kVerbPhrases = {
    "save a great deal of money", "waste precious hours", "feel more connected",
    "lose touch with their community", "learn to think for themselves",
    "depend too heavily on screens", "discover new interests", "argue about priorities",
    "build lasting habits", "struggle to keep up", "question old assumptions",
    "travel less often", "take fewer risks", "spend more time outdoors",
    "earn a little extra", "worry about the future", "meet people from elsewhere",
    "change their daily routines", "vote differently", "sleep badly",
    "trust their own judgement", "complain loudly", "find quiet satisfaction",
    "face unexpected costs", "gain practical skills", "forget basic facts",
    "read more widely", "protect the environment", "ignore the warnings",
    "grow more independent", "cooperate with strangers", "rethink their budgets",
    "fall behind", "move to bigger cities", "look for cheaper options",
    "share responsibility", "invent clever shortcuts", "help their neighbours",
    "become frustrated", "appreciate small things",
};

constexpr std::array<std::string_view, 30> kQualities = {
    "expensive", "surprisingly useful", "overrated", "essential", "harmful in the long run",
    "fair", "rather confusing", "convenient", "risky", "old-fashioned",
    "worth defending", "poorly planned", "exciting", "unavoidable", "noisy",
    "efficient", "unfair to the poor", "badly explained", "healthy", "fragile",
    "popular", "divisive", "cheap", "demanding", "liberating",
    "tiring", "predictable", "underfunded", "wasteful", "generous",
};

constexpr std::array<std::string_view, 28> kReasons = {
    "the costs keep rising every year", "nobody asked the people affected",
    "the evidence is still mixed", "habits are hard to break", "budgets are limited",
    "technology changes faster than rules", "children copy what adults do",
    "most towns lack the infrastructure", "trust takes years to build",
    "the benefits arrive slowly", "quality matters more than quantity",
    "everyone learns at a different pace", "the weather here is unpredictable",
    "salaries have not kept pace with prices", "attention is a scarce resource",
    "local culture deserves respect", "the old system was never perfect",
    "young people are more adaptable", "mistakes are expensive to fix",
    "competition pushes prices down", "fresh air improves concentration",
    "public money should serve everyone", "experience cannot be downloaded",
    "small changes add up", "rules without enforcement mean little",
    "families have less free time", "the data are easy to misread",
    "cities grow faster than villages",
};

constexpr std::array<std::string_view, 22> kOpeners = {
    "In my opinion,", "Some people believe that", "It is often said that",
    "Nowadays,", "From my own experience,", "To begin with,", "On the other hand,",
    "However,", "Moreover,", "For example,", "In addition,", "Admittedly,",
    "Of course,", "Last summer,", "According to a recent survey,", "Personally,",
    "At first glance,", "Even so,", "In the end,", "Similarly,", "Despite this,",
    "To be honest,",
};

constexpr std::array<std::string_view, 12> kClosers = {
    "In conclusion,", "To sum up,", "All things considered,", "Overall,",
    "For these reasons,", "Taking everything into account,", "Ultimately,",
    "On balance,", "In short,", "Therefore,", "As a result,", "Finally,",
};

constexpr std::array<std::string_view, 14> kNumbers = {
    "two", "three", "five", "ten", "twenty", "forty", "a hundred",
    "12", "35", "7", "1998", "2015", "60 percent of", "half of",
};

std::string_view pick(SeededRng& rng, Bank bank) { return bank[rng.below(bank.size())]; }

std::string capitalize(std::string s) {
  for (char& c : s) {
    if (std::isalpha(static_cast<unsigned char>(c))) {
      c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
      break;
    }
  }
  return s;
}

std::string sentence(SeededRng& rng, std::string_view topic, bool closing) {
  const std::string_view actor = pick(rng, kActors);
  const std::string_view verb = pick(rng, kVerbPhrases);
  const std::string_view quality = pick(rng, kQualities);
  const std::string_view reason = pick(rng, kReasons);
  const std::string_view other = pick(rng, kTopics);
  std::string s;
  switch (rng.below(12)) {
    case 0:
      s = fmt::format("{} {} is {} because {}.", pick(rng, kOpeners), topic, quality, reason);
      break;
    case 1:
      s = fmt::format("{} say that those who support {} {}.", actor, topic, verb);
      break;
    case 2:
      s = fmt::format("When it comes to {}, {} tend to {}.", topic, actor, verb);
      break;
    case 3:
      s = fmt::format("{} {} often {}, since {}.", pick(rng, kOpeners), actor, verb, reason);
      break;
    case 4:
      s = fmt::format("I once saw {} people {} after a debate about {}.", pick(rng, kNumbers), verb,
                      topic);
      break;
    case 5:
      s = fmt::format("Is {} really {}? {} would probably disagree.", topic, quality,
                      capitalize(std::string(actor)));
      break;
    case 6:
      s = fmt::format("Compared with {}, {} seems {} and a little {}.", other, topic, quality,
                      pick(rng, kQualities));
      break;
    case 7:
      s = fmt::format("\"It is {},\" {} told me, \"but {}.\"", quality, actor, reason);
      break;
    case 8:
      s = fmt::format("{} if {} becomes {}, {} will {}.", pick(rng, kOpeners), topic, quality,
                      actor, verb);
      break;
    case 9:
      s = fmt::format("Not everyone agrees; {} point out that {}.", actor, reason);
      break;
    case 10:
      s = fmt::format("{} ({} in particular) {} whenever {} is discussed.", actor,
                      pick(rng, kActors), verb, topic);
      break;
    default:
      s = fmt::format("Within {} years, {} may look {}, yet {}.", pick(rng, kNumbers), topic,
                      quality, reason);
      break;
  }
  if (closing) s = fmt::format("{} {}", pick(rng, kClosers), s);
  return capitalize(std::move(s));
}

}  // namespace

std::string generate_essay(std::uint64_t seed, std::size_t target_chars) {
  SeededRng rng(seed);
  const std::string_view topic = pick(rng, kTopics);
  std::string out;
  std::size_t in_paragraph = 0;
  std::size_t paragraph_len = 3 + rng.below(4);
  while (out.size() < target_chars) {
    const bool closing = out.size() + 160 >= target_chars && rng.below(2) == 0;
    std::string s = sentence(rng, topic, closing);
    if (!out.empty()) out.push_back(in_paragraph == 0 ? '\n' : ' ');
    out += s;
    if (++in_paragraph >= paragraph_len) {
      in_paragraph = 0;
      paragraph_len = 3 + rng.below(4);
    }
  }
  return out;
}

std::vector<CorpusRecord> synthesize_corpus(const SyntheticCorpusOptions& o) {
  if (o.min_chars == 0 || o.min_chars > o.max_chars) {
    throw ConfigError("synthetic corpus length bounds are invalid");
  }
  if (o.human_train == 0) throw ConfigError("synthetic corpus needs human training essays");
  SeededRng lengths(derive_seed(o.seed, 0));
  std::vector<CorpusRecord> out;

  const std::size_t humans = o.human_train + o.human_eval;
  for (std::size_t i = 0; i < humans; ++i) {
    const std::size_t len = lengths.between(o.min_chars, o.max_chars);
    out.push_back({fmt::format("human-{:04d}", i), Label::kHuman,
                   generate_essay(derive_seed(o.seed, 1000 + i), len)});
  }

  std::vector<std::u32string> train_texts;
  for (std::size_t i = 0; i < o.human_train; ++i) train_texts.push_back(utf8_to_u32(out[i].text));
  const NgramModel model = train(train_texts, o.order, o.alpha);

  const std::size_t ais = o.ai_calibration + o.ai_eval;
  for (std::size_t i = 0; i < ais; ++i) {
    const std::size_t len = lengths.between(o.min_chars, o.max_chars);
    out.push_back({fmt::format("ai-{:04d}", i), Label::kAi,
                   u32_to_utf8(sample(model, len, derive_seed(o.seed, 500000 + i)))});
  }
  return out;
}

CorpusSplit split_corpus(std::span<const CorpusRecord> records, double fraction) {
  if (!(fraction > 0.0 && fraction < 1.0)) {
    throw ConfigError(fmt::format("train split must be in (0, 1), got {}", fraction));
  }
  std::size_t n_human = 0, n_ai = 0;
  for (const auto& r : records) (r.label == Label::kHuman ? n_human : n_ai)++;
  if (n_human == 0 || n_ai == 0) {
    throw ConfigError("corpus must contain both human and ai records");
  }
  const auto take_human = static_cast<std::size_t>(std::llround(fraction * static_cast<double>(n_human)));
  const auto take_ai = static_cast<std::size_t>(std::llround(fraction * static_cast<double>(n_ai)));
  if (take_human == 0 || take_ai == 0 || take_human == n_human || take_ai == n_ai) {
    throw ConfigError("train split leaves a label without training or evaluation records");
  }

  CorpusSplit split;
  std::vector<CorpusRecord> calib_ai;
  std::size_t seen_human = 0, seen_ai = 0;
  for (const auto& r : records) {
    if (r.label == Label::kHuman) {
      if (seen_human++ < take_human) {
        split.train_human.push_back(r);
        continue;
      }
    } else if (seen_ai++ < take_ai) {
      calib_ai.push_back(r);
      continue;
    }
    split.evaluation.push_back(r);
  }
  split.calibration = split.train_human;
  split.calibration.insert(split.calibration.end(), calib_ai.begin(), calib_ai.end());
  return split;
}

}  // namespace pdfuzz
