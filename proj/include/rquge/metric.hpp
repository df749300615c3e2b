#pragma once

#include <cstddef>
#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "rquge/core.hpp"
#include "rquge/runtime.hpp"

namespace rquge {

/// Acceptance score of one candidate question.
struct RqugeScore {
  double kappa = 1.0;  // in [1, 5]
  std::string predicted_answer;
  std::optional<double> normalized;  // (kappa - 1) / 4 when requested
  bool truncated = false;

  bool operator==(const RqugeScore&) const = default;
};

/// Linear map of kappa onto [0, 1].
double normalize(const RqugeScore& score);

struct RqugeOptions {
  bool normalize = false;
};

/// The metric: answer the candidate with the QA runner, then rate the
/// predicted answer against the gold span with the span scorer.
class Rquge {
 public:
  Rquge(std::shared_ptr<const runtime::QARunner> qa,
        std::shared_ptr<const runtime::SpanScorer> scorer, RqugeOptions options = {});

  /// Deterministic for fixed runners. The reference question is never read.
  /// Runner errors are rethrown with the instance id prefixed.
  RqugeScore score(const QGInstance& instance, std::string_view candidate) const;

  const runtime::QARunner& qa() const { return *qa_; }
  const runtime::SpanScorer& scorer() const { return *scorer_; }
  const RqugeOptions& options() const { return options_; }

  /// Scores a list of (instance, candidate) pairs with batched runner
  /// calls. Throws if any item fails; callers needing isolation use
  /// rquge_batch.
  std::vector<RqugeScore> score_many(
      std::span<const std::pair<const QGInstance*, std::string>> items) const;

 private:
  RqugeScore finish(double kappa, std::string predicted, bool truncated) const;

  std::shared_ptr<const runtime::QARunner> qa_;
  std::shared_ptr<const runtime::SpanScorer> scorer_;
  RqugeOptions options_;
};

RqugeScore rquge_score(const QGInstance& instance, std::string_view candidate,
                       const runtime::QARunner& qa, const runtime::SpanScorer& scorer);

/// Candidate texts to score for one instance.
using CandidateSelector = std::function<std::vector<std::string>(const QGInstance&)>;

namespace selectors {
CandidateSelector all_candidates();
CandidateSelector first_candidate();
CandidateSelector reference_question();
CandidateSelector by_name(std::string_view name);  // "all", "first", "reference"
}  // namespace selectors

/// One scored row: either a score or the failure message for that item.
struct BatchRow {
  std::string id;
  std::string candidate;
  std::optional<RqugeScore> score;
  std::string error;

  bool ok() const { return score.has_value(); }
};

struct BatchOptions {
  std::size_t batch_size = 8;
  std::size_t jobs = 1;  // honoured only for concurrency-safe runners
};

/// Scores every selected candidate of every instance. Rows come back in
/// input order and equal element-wise rquge_score calls. A failing item
/// (or a selector failure) is reported on its row; the rest of the batch
/// still runs.
std::vector<BatchRow> rquge_batch(std::span<const QGInstance> instances,
                                  const CandidateSelector& selector, const Rquge& metric,
                                  BatchOptions options = {});

/// Score output row: {"id","candidate","kappa","predicted_answer","normalized"?,"truncated"}.
Json to_json(const BatchRow& row);

}  // namespace rquge
