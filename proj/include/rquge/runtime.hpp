#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <mutex>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "rquge/cache.hpp"
#include "rquge/core.hpp"

// Inference-runner contracts for every external model the metric and its
// tooling consume. Backends do the model work; runners add validation,
// truncation, caching and call serialization on top.
namespace rquge::runtime {

struct QARunnerHandle {
  std::string name;  // includes model version; part of every cache key
  std::size_t max_input_length = 512;  // in the backend's own tokens
  bool concurrency_safe = false;
};

struct SpanScorerHandle {
  std::string name;
  double score_min = 1.0;
  double score_max = 5.0;
  bool concurrency_safe = false;
};

/// Nucleus sampling settings for question generation.
struct SamplingConfig {
  double temperature = 1.0;
  double top_p = 0.94;
  int num_candidates = 50;

  void validate() const;
};

struct GeneratorHandle {
  std::string name;
  SamplingConfig sampling;
  bool concurrency_safe = false;
};

/// Generic handle for the auxiliary runners (NER, paraphraser, translator).
struct AuxHandle {
  std::string name;
  bool concurrency_safe = false;
};

struct NerEntity {
  std::string surface;
  std::string type;
  std::size_t char_start = 0;  // code points into the analysed text

  bool operator==(const NerEntity&) const = default;
};

// ---------------------------------------------------------------------------
// Backend interfaces
// ---------------------------------------------------------------------------

struct QAInput {
  std::string question;
  std::string context;   // after truncation
  std::string assembled; // question + separator + context
};

class QABackend {
 public:
  virtual ~QABackend() = default;
  virtual std::string answer(const QAInput& input) = 0;
  /// Batched form; the default loops over answer().
  virtual std::vector<std::string> answer_batch(std::span<const QAInput> inputs);
  /// Token count under the backend tokenizer. Default: whitespace tokens.
  virtual std::size_t count_tokens(std::string_view text) const;
};

struct SpanScorerInput {
  std::string question;
  std::string gold;
  std::string predicted;
  std::string context;
  std::string assembled;  // "[CLS] q [q] gold [r] pred [c] context"
};

class SpanScorerBackend {
 public:
  virtual ~SpanScorerBackend() = default;
  /// Unbounded regression output.
  virtual double raw_score(const SpanScorerInput& input) = 0;
  virtual std::vector<double> raw_score_batch(std::span<const SpanScorerInput> inputs);
};

struct GenerationRequest {
  AnswerSpan answer;
  std::string context;
  SamplingConfig sampling;
  std::uint64_t seed = 0;
};

class GeneratorBackend {
 public:
  virtual ~GeneratorBackend() = default;
  virtual std::vector<CandidateQuestion> sample(const GenerationRequest& request) = 0;
  /// Deterministic beam-search output, used as a non-reranked baseline.
  virtual CandidateQuestion beam_search(const GenerationRequest& request, int beam_size) = 0;
};

class NerBackend {
 public:
  virtual ~NerBackend() = default;
  virtual std::vector<NerEntity> entities(const std::string& text) = 0;
};

class ParaphraseBackend {
 public:
  virtual ~ParaphraseBackend() = default;
  virtual std::string paraphrase(const std::string& question) = 0;
};

class TranslateBackend {
 public:
  virtual ~TranslateBackend() = default;
  virtual std::string translate(const std::string& text, const std::string& src,
                                const std::string& tgt) = 0;
};

// ---------------------------------------------------------------------------
// Runners
// ---------------------------------------------------------------------------

/// Serializes calls unless the backend declared itself concurrency safe.
class CallGate {
 public:
  explicit CallGate(bool concurrency_safe) : safe_(concurrency_safe) {}
  template <typename F>
  auto run(F&& f) {
    if (safe_) return f();
    std::lock_guard lock(mutex_);
    return f();
  }
  bool concurrency_safe() const { return safe_; }

 private:
  bool safe_;
  std::mutex mutex_;
};

struct QAResult {
  AnswerSpan answer;
  bool truncated = false;
};

class QARunner {
 public:
  QARunner(QARunnerHandle handle, std::shared_ptr<QABackend> backend,
           std::shared_ptr<ResultCache> cache = nullptr, std::string separator = "\n");

  /// Predicted answer for `question` over `context`. The context tail is
  /// truncated when the assembled input exceeds max_input_length; the
  /// question is never cut.
  QAResult answer(std::string_view question, std::string_view context) const;
  std::vector<QAResult> answer_batch(
      std::span<const std::pair<std::string, std::string>> question_context) const;

  /// The exact backend input after truncation, plus the truncation flag.
  std::pair<QAInput, bool> assemble(std::string_view question, std::string_view context) const;

  const QARunnerHandle& handle() const { return handle_; }
  const std::string& separator() const { return separator_; }

 private:
  QARunnerHandle handle_;
  std::shared_ptr<QABackend> backend_;
  std::shared_ptr<ResultCache> cache_;
  std::string separator_;
  mutable CallGate gate_;
};

std::string assemble_span_scorer_input(std::string_view question, std::string_view gold,
                                       std::string_view predicted, std::string_view context);

class SpanScorer {
 public:
  SpanScorer(SpanScorerHandle handle, std::shared_ptr<SpanScorerBackend> backend,
             std::shared_ptr<ResultCache> cache = nullptr);

  /// Backend output clamped to [score_min, score_max].
  double score(std::string_view question, std::string_view gold, std::string_view predicted,
               std::string_view context) const;

  struct Item {
    std::string question, gold, predicted, context;
  };
  std::vector<double> score_batch(std::span<const Item> items) const;

  const SpanScorerHandle& handle() const { return handle_; }

 private:
  SpanScorerInput make_input(std::string_view question, std::string_view gold,
                             std::string_view predicted, std::string_view context) const;
  double clamp(double raw) const;

  SpanScorerHandle handle_;
  std::shared_ptr<SpanScorerBackend> backend_;
  std::shared_ptr<ResultCache> cache_;
  mutable CallGate gate_;
};

class Generator {
 public:
  Generator(GeneratorHandle handle, std::shared_ptr<GeneratorBackend> backend,
            std::shared_ptr<ResultCache> cache = nullptr);

  /// Exactly sampling.num_candidates questions, each with a finite ppl.
  std::vector<CandidateQuestion> generate_candidates(const AnswerSpan& answer,
                                                     std::string_view context,
                                                     std::uint64_t seed) const;
  CandidateQuestion beam_search(const AnswerSpan& answer, std::string_view context,
                                int beam_size = 5) const;

  const GeneratorHandle& handle() const { return handle_; }

 private:
  GeneratorHandle handle_;
  std::shared_ptr<GeneratorBackend> backend_;
  std::shared_ptr<ResultCache> cache_;
  mutable CallGate gate_;
};

class NerRunner {
 public:
  NerRunner(AuxHandle handle, std::shared_ptr<NerBackend> backend,
            std::shared_ptr<ResultCache> cache = nullptr);
  std::vector<NerEntity> entities(std::string_view text) const;
  const AuxHandle& handle() const { return handle_; }

 private:
  AuxHandle handle_;
  std::shared_ptr<NerBackend> backend_;
  std::shared_ptr<ResultCache> cache_;
  mutable CallGate gate_;
};

class Paraphraser {
 public:
  Paraphraser(AuxHandle handle, std::shared_ptr<ParaphraseBackend> backend,
              std::shared_ptr<ResultCache> cache = nullptr);
  std::string paraphrase(std::string_view question) const;
  const AuxHandle& handle() const { return handle_; }

 private:
  AuxHandle handle_;
  std::shared_ptr<ParaphraseBackend> backend_;
  std::shared_ptr<ResultCache> cache_;
  mutable CallGate gate_;
};

class Translator {
 public:
  Translator(AuxHandle handle, std::shared_ptr<TranslateBackend> backend,
             std::shared_ptr<ResultCache> cache = nullptr);
  std::string translate(std::string_view text, std::string_view src, std::string_view tgt) const;
  const AuxHandle& handle() const { return handle_; }

 private:
  AuxHandle handle_;
  std::shared_ptr<TranslateBackend> backend_;
  std::shared_ptr<ResultCache> cache_;
  mutable CallGate gate_;
};

}  // namespace rquge::runtime
