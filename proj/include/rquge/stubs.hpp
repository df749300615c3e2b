#pragma once

#include <atomic>
#include <cstddef>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "rquge/runtime.hpp"

// Deterministic offline backends. Every stub is a pure function of its
// inputs (and the request seed) and counts its invocations so tests can
// check cache behaviour.
namespace rquge::stubs {

class InvocationCounter {
 public:
  std::size_t calls() const { return calls_; }

 protected:
  void count() { ++calls_; }

 private:
  std::atomic<std::size_t> calls_{0};
};

/// Looks answers up in a (question, context) table, then falls back to an
/// optional function. Throws when neither applies.
class TableQABackend : public runtime::QABackend, public InvocationCounter {
 public:
  using Fallback = std::function<std::string(const runtime::QAInput&)>;
  explicit TableQABackend(std::map<std::pair<std::string, std::string>, std::string> table,
                          Fallback fallback = nullptr);
  std::string answer(const runtime::QAInput& input) override;

 private:
  std::map<std::pair<std::string, std::string>, std::string> table_;
  Fallback fallback_;
};

/// Extractive reader: picks the context sentence sharing the most tokens
/// with the question and answers with the longest run of tokens in it that
/// the question does not mention.
class LexicalQABackend : public runtime::QABackend, public InvocationCounter {
 public:
  std::string answer(const runtime::QAInput& input) override;
};

/// raw = 1 + 4 * tokenF1(gold, predicted).
class OverlapSpanScorerBackend : public runtime::SpanScorerBackend, public InvocationCounter {
 public:
  double raw_score(const runtime::SpanScorerInput& input) override;
};

class FunctionSpanScorerBackend : public runtime::SpanScorerBackend, public InvocationCounter {
 public:
  explicit FunctionSpanScorerBackend(std::function<double(const runtime::SpanScorerInput&)> f)
      : f_(std::move(f)) {}
  double raw_score(const runtime::SpanScorerInput& input) override {
    count();
    return f_(input);
  }

 private:
  std::function<double(const runtime::SpanScorerInput&)> f_;
};

/// Builds "wh-word + context window?" questions with a seeded RNG. Windows
/// come from the answer's sentence more often than not, so the lexical QA
/// stub recovers the answer for some candidates and not others.
class TemplateGeneratorBackend : public runtime::GeneratorBackend, public InvocationCounter {
 public:
  std::vector<CandidateQuestion> sample(const runtime::GenerationRequest& request) override;
  CandidateQuestion beam_search(const runtime::GenerationRequest& request, int beam_size) override;
};

/// Tags every word-bounded occurrence of the listed surfaces. Longer
/// surfaces win where matches overlap.
class GazetteerNerBackend : public runtime::NerBackend, public InvocationCounter {
 public:
  explicit GazetteerNerBackend(std::map<std::string, std::string> surface_to_type);
  std::vector<runtime::NerEntity> entities(const std::string& text) override;

 private:
  std::map<std::string, std::string> gazetteer_;
};

/// Capitalised word runs are ENTITY (a lone sentence-initial word is
/// skipped), four-digit years are DATE, other numbers CARDINAL.
class HeuristicNerBackend : public runtime::NerBackend, public InvocationCounter {
 public:
  std::vector<runtime::NerEntity> entities(const std::string& text) override;
};

/// Replaces the first word that has a synonym in the table.
class SynonymParaphraseBackend : public runtime::ParaphraseBackend, public InvocationCounter {
 public:
  explicit SynonymParaphraseBackend(std::map<std::string, std::string> synonyms);
  std::string paraphrase(const std::string& question) override;

 private:
  std::map<std::string, std::string> synonyms_;
};

/// Word-for-word dictionary per (src, tgt) direction; unknown words and
/// unknown directions pass through unchanged. With no dictionaries this is
/// the identity translator.
class DictionaryTranslateBackend : public runtime::TranslateBackend, public InvocationCounter {
 public:
  using Dictionary = std::map<std::string, std::string>;
  explicit DictionaryTranslateBackend(
      std::map<std::pair<std::string, std::string>, Dictionary> directions = {});
  std::string translate(const std::string& text, const std::string& src,
                        const std::string& tgt) override;

 private:
  std::map<std::pair<std::string, std::string>, Dictionary> directions_;
};

/// Synonym table used by the stub paraphraser and stub translator.
const std::map<std::string, std::string>& default_synonyms();

/// Replaces whole words using `table`, matching case-insensitively and
/// keeping the capitalisation of the first letter. Stops after `limit`
/// replacements when set.
std::string replace_words(const std::string& text, const std::map<std::string, std::string>& table,
                          std::optional<std::size_t> limit = std::nullopt);

}  // namespace rquge::stubs
