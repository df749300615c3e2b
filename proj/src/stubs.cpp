#include "rquge/stubs.hpp"

#include <algorithm>
#include <cctype>
#include <set>
#include <string_view>

#include "rquge/error.hpp"
#include "rquge/random.hpp"
#include "rquge/text.hpp"

namespace rquge::stubs {
namespace {

using text::WordToken;

bool is_word(const WordToken& t) {
  const auto c = static_cast<unsigned char>(t.text[0]);
  return c >= 0x80 || std::isalnum(c) != 0;
}

bool is_sentence_end(const WordToken& t) { return t.text == "." || t.text == "?" || t.text == "!"; }

/// Token index ranges [first, last) of each sentence.
std::vector<std::pair<std::size_t, std::size_t>> sentences(const std::vector<WordToken>& toks) {
  std::vector<std::pair<std::size_t, std::size_t>> out;
  std::size_t start = 0;
  for (std::size_t i = 0; i < toks.size(); ++i) {
    if (is_sentence_end(toks[i])) {
      out.emplace_back(start, i + 1);
      start = i + 1;
    }
  }
  if (start < toks.size()) out.emplace_back(start, toks.size());
  return out;
}

const std::set<std::string>& stopwords() {
  static const std::set<std::string> kStop = {
      "a",    "an",   "the", "of",  "in",   "on",   "at",    "to",   "is",  "was",
      "are",  "were", "be",  "what", "who", "whom", "which", "when", "where", "how",
      "why",  "did",  "do",  "does", "for", "by",   "with",  "and",  "or",  "that",
      "this", "it",   "its", "as",  "from", "has",  "have",  "had"};
  return kStop;
}

std::set<std::string> content_words(std::string_view s) {
  std::set<std::string> out;
  for (const auto& t : text::word_tokens(s)) {
    if (!is_word(t)) continue;
    auto w = text::to_lower(t.text);
    if (!stopwords().count(w)) out.insert(std::move(w));
  }
  return out;
}

std::string match_case(const std::string& source, std::string replacement) {
  if (!source.empty() && !replacement.empty() &&
      std::isupper(static_cast<unsigned char>(source[0])) &&
      std::islower(static_cast<unsigned char>(replacement[0]))) {
    replacement[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(replacement[0])));
  }
  return replacement;
}

bool boundary_ok(const std::string& text, std::size_t begin, std::size_t end) {
  const auto alnum = [](char c) {
    auto u = static_cast<unsigned char>(c);
    return u >= 0x80 || std::isalnum(u) != 0;
  };
  if (begin > 0 && alnum(text[begin - 1])) return false;
  if (end < text.size() && alnum(text[end])) return false;
  return true;
}

constexpr std::string_view kWhWords[] = {"what", "who", "which", "when", "where", "how"};

struct SentenceWords {
  std::vector<std::vector<std::string>> words;  // per sentence, answer tokens removed
  std::size_t answer_sentence = 0;
};

SentenceWords sentence_words(const runtime::GenerationRequest& req) {
  const auto toks = text::word_tokens(req.context);
  const auto sents = sentences(toks);
  std::set<std::string> answer_toks;
  for (const auto& t : text::word_tokens(req.answer.text)) answer_toks.insert(text::to_lower(t.text));

  std::size_t answer_byte = std::string::npos;
  if (req.answer.char_start) {
    answer_byte = text::utf8_byte_offset(req.context, *req.answer.char_start).value_or(std::string::npos);
  }
  if (answer_byte == std::string::npos) answer_byte = req.context.find(req.answer.text);

  SentenceWords out;
  for (std::size_t s = 0; s < sents.size(); ++s) {
    auto [first, last] = sents[s];
    std::vector<std::string> kept;
    std::vector<std::string> all;
    for (std::size_t i = first; i < last; ++i) {
      if (!is_word(toks[i])) continue;
      all.push_back(toks[i].text);
      if (!answer_toks.count(text::to_lower(toks[i].text))) kept.push_back(toks[i].text);
    }
    out.words.push_back(kept.empty() ? all : kept);
    if (answer_byte != std::string::npos && toks[first].begin <= answer_byte &&
        answer_byte < toks[last - 1].end) {
      out.answer_sentence = s;
    }
  }
  if (out.words.empty()) out.words.push_back({"it"});
  return out;
}

}  // namespace

// ---------------------------------------------------------------------------

TableQABackend::TableQABackend(std::map<std::pair<std::string, std::string>, std::string> table,
                               Fallback fallback)
    : table_(std::move(table)), fallback_(std::move(fallback)) {}

std::string TableQABackend::answer(const runtime::QAInput& input) {
  count();
  if (auto it = table_.find({input.question, input.context}); it != table_.end()) return it->second;
  if (fallback_) return fallback_(input);
  throw Error("no stub answer for question '" + input.question + "'");
}

std::string LexicalQABackend::answer(const runtime::QAInput& input) {
  count();
  const auto toks = text::word_tokens(input.context);
  const auto sents = sentences(toks);
  if (sents.empty()) return "";
  const auto question_words = content_words(input.question);
  std::set<std::string> question_all;
  for (const auto& t : text::word_tokens(input.question)) question_all.insert(text::to_lower(t.text));

  std::size_t best = 0;
  std::size_t best_overlap = 0;
  for (std::size_t s = 0; s < sents.size(); ++s) {
    std::set<std::string> seen;
    for (std::size_t i = sents[s].first; i < sents[s].second; ++i) {
      auto w = text::to_lower(toks[i].text);
      if (question_words.count(w)) seen.insert(w);
    }
    if (seen.size() > best_overlap) {
      best_overlap = seen.size();
      best = s;
    }
  }

  // Longest run of words the question does not mention.
  std::size_t run_first = 0, run_len = 0, best_first = 0, best_len = 0;
  for (std::size_t i = sents[best].first; i < sents[best].second; ++i) {
    const bool answerish = is_word(toks[i]) && !question_all.count(text::to_lower(toks[i].text));
    if (answerish) {
      if (run_len == 0) run_first = i;
      ++run_len;
      if (run_len > best_len) {
        best_len = run_len;
        best_first = run_first;
      }
    } else {
      run_len = 0;
    }
  }
  if (best_len == 0) {
    best_first = sents[best].first;
    best_len = 1;
  }
  const auto& a = toks[best_first];
  const auto& b = toks[best_first + best_len - 1];
  return input.context.substr(a.begin, b.end - a.begin);
}

double OverlapSpanScorerBackend::raw_score(const runtime::SpanScorerInput& input) {
  count();
  return 1.0 + 4.0 * text::token_f1(input.predicted, input.gold);
}

std::vector<CandidateQuestion> TemplateGeneratorBackend::sample(
    const runtime::GenerationRequest& req) {
  count();
  Rng rng(mix_seed(req.seed, req.context + '\x1f' + req.answer.text));
  const auto sw = sentence_words(req);
  std::vector<CandidateQuestion> out;
  for (int i = 0; i < req.sampling.num_candidates; ++i) {
    const std::size_t s =
        rng.uniform01() < 0.6 ? sw.answer_sentence : rng.uniform_index(sw.words.size());
    const auto& words = sw.words[s].empty() ? sw.words[sw.answer_sentence] : sw.words[s];
    std::string q(kWhWords[rng.uniform_index(std::size(kWhWords))]);
    if (!words.empty()) {
      const std::size_t len = 1 + rng.uniform_index(std::min<std::size_t>(words.size(), 6));
      const std::size_t start = rng.uniform_index(words.size() - len + 1);
      for (std::size_t k = start; k < start + len; ++k) q += " " + words[k];
    } else {
      q += " it";
    }
    q += "?";
    const double ppl = 1.5 + 25.0 * rng.uniform01();
    out.push_back(CandidateQuestion{q, ppl, CandidateSource::generated});
  }
  return out;
}

CandidateQuestion TemplateGeneratorBackend::beam_search(const runtime::GenerationRequest& req,
                                                        int beam_size) {
  count();
  const auto sw = sentence_words(req);
  const auto& words = sw.words[sw.answer_sentence];
  const std::size_t n = std::min<std::size_t>(words.size(), static_cast<std::size_t>(beam_size) + 1);
  std::string q = "what";
  for (std::size_t k = 0; k < n; ++k) q += " " + words[k];
  if (n == 0) q += " it";
  q += "?";
  return CandidateQuestion{q, 1.0 + 0.5 * static_cast<double>(n), CandidateSource::generated};
}

GazetteerNerBackend::GazetteerNerBackend(std::map<std::string, std::string> surface_to_type)
    : gazetteer_(std::move(surface_to_type)) {}

std::vector<runtime::NerEntity> GazetteerNerBackend::entities(const std::string& text) {
  count();
  struct Hit {
    std::size_t begin, end;
    const std::string* type;
  };
  std::vector<Hit> hits;
  for (const auto& [surface, type] : gazetteer_) {
    if (surface.empty()) continue;
    for (auto pos = text.find(surface); pos != std::string::npos; pos = text.find(surface, pos + 1)) {
      if (boundary_ok(text, pos, pos + surface.size())) hits.push_back({pos, pos + surface.size(), &type});
    }
  }
  std::sort(hits.begin(), hits.end(), [](const Hit& a, const Hit& b) {
    if (a.begin != b.begin) return a.begin < b.begin;
    return a.end > b.end;
  });
  std::vector<runtime::NerEntity> out;
  std::size_t covered = 0;
  for (const auto& h : hits) {
    if (h.begin < covered) continue;
    out.push_back({text.substr(h.begin, h.end - h.begin), *h.type, text::utf8_char_index(text, h.begin)});
    covered = h.end;
  }
  return out;
}

std::vector<runtime::NerEntity> HeuristicNerBackend::entities(const std::string& text) {
  count();
  const auto toks = text::word_tokens(text);
  std::vector<runtime::NerEntity> out;
  const auto emit = [&](std::size_t first, std::size_t last, std::string type) {
    const auto b = toks[first].begin;
    const auto e = toks[last - 1].end;
    out.push_back({text.substr(b, e - b), std::move(type), text::utf8_char_index(text, b)});
  };
  bool sentence_start = true;
  std::size_t i = 0;
  while (i < toks.size()) {
    const auto& t = toks[i];
    const auto c0 = static_cast<unsigned char>(t.text[0]);
    if (std::isupper(c0)) {
      std::size_t j = i + 1;
      while (j < toks.size() && std::isupper(static_cast<unsigned char>(toks[j].text[0]))) ++j;
      if (!(sentence_start && j == i + 1)) emit(i, j, "ENTITY");
      sentence_start = false;
      i = j;
      continue;
    }
    if (std::isdigit(c0)) {
      const bool digits = std::all_of(t.text.begin(), t.text.end(),
                                      [](char c) { return std::isdigit(static_cast<unsigned char>(c)); });
      if (digits) {
        const bool year = t.text.size() == 4 && (t.text[0] == '1' || t.text[0] == '2');
        emit(i, i + 1, year ? "DATE" : "CARDINAL");
      }
    }
    sentence_start = is_sentence_end(t);
    ++i;
  }
  return out;
}

std::string replace_words(const std::string& text, const std::map<std::string, std::string>& table,
                          std::optional<std::size_t> limit) {
  std::string out;
  std::size_t cursor = 0;
  std::size_t done = 0;
  for (const auto& t : text::word_tokens(text)) {
    if (limit && done >= *limit) break;
    auto it = table.find(text::to_lower(t.text));
    if (it == table.end()) continue;
    out += text.substr(cursor, t.begin - cursor);
    out += match_case(t.text, it->second);
    cursor = t.end;
    ++done;
  }
  out += text.substr(cursor);
  return out;
}

SynonymParaphraseBackend::SynonymParaphraseBackend(std::map<std::string, std::string> synonyms)
    : synonyms_(std::move(synonyms)) {}

std::string SynonymParaphraseBackend::paraphrase(const std::string& question) {
  count();
  return replace_words(question, synonyms_, 1);
}

DictionaryTranslateBackend::DictionaryTranslateBackend(
    std::map<std::pair<std::string, std::string>, Dictionary> directions)
    : directions_(std::move(directions)) {}

std::string DictionaryTranslateBackend::translate(const std::string& text, const std::string& src,
                                                  const std::string& tgt) {
  count();
  auto it = directions_.find({src, tgt});
  if (it == directions_.end()) return text;
  return replace_words(text, it->second);
}

const std::map<std::string, std::string>& default_synonyms() {
  static const std::map<std::string, std::string> kSynonyms = {
      {"developing", "expanding"}, {"famous", "well-known"},  {"began", "started"},
      {"begin", "start"},          {"city", "town"},          {"country", "nation"},
      {"largest", "biggest"},      {"big", "large"},          {"small", "little"},
      {"built", "constructed"},    {"created", "made"},       {"located", "situated"},
      {"important", "significant"}, {"main", "primary"},      {"called", "named"},
      {"received", "got"},         {"kind", "type"},          {"many", "numerous"},
      {"discovered", "found"},     {"used", "utilized"},      {"gave", "provided"},
      {"help", "assist"},          {"show", "display"},       {"killed", "slain"},
      {"given", "granted"},        {"say", "state"},          {"long", "lengthy"},
      {"cost", "price"},           {"happened", "occurred"}};
  return kSynonyms;
}

}  // namespace rquge::stubs
