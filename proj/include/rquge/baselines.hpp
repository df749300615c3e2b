#pragma once

#include <functional>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "rquge/core.hpp"

// Reference-based baselines and QA accuracy scores. All n-gram metrics use
// text::ngram_tokens (lowercased, punctuation split off).
namespace rquge::baselines {

struct MetricValue {
  std::string metric_name;
  double value = 0.0;
  bool higher_is_better = true;
};

/// Smoothing floor for zero n-gram matches.
inline constexpr double kBleuEpsilon = 1e-9;

/// Sentence BLEU-4: geometric mean of clipped 1..4-gram precisions times the
/// brevity penalty. Zero match counts are replaced by kBleuEpsilon. An
/// empty candidate scores 0 with a warning; an empty reference raises
/// ReferenceRequiredError.
double bleu4(std::string_view candidate, std::string_view reference);

enum class RougeVariant { rouge1, rougeL };

/// ROUGE-1 is clipped unigram F1; ROUGE-L is F1 over the longest common
/// subsequence.
double rouge(std::string_view candidate, std::string_view reference, RougeVariant variant);

struct QAScore {
  double f1 = 0.0;
  int em = 0;
};

/// SQuAD-style token F1 and exact match after answer normalization.
QAScore qa_f1_em(std::string_view predicted, std::string_view gold);

/// Longest common subsequence length of two token sequences.
std::size_t lcs_length(const std::vector<std::string>& a, const std::vector<std::string>& b);

// ---------------------------------------------------------------------------
// External metric adapters (BERTScore, BLEURT, COMET, ... served elsewhere)
// ---------------------------------------------------------------------------

struct ExternalInput {
  std::string candidate;
  std::optional<std::string> reference;
  std::optional<std::string> context;
  std::optional<std::string> answer;
};

struct Adapter {
  std::function<double(const ExternalInput&)> fn;
  bool higher_is_better = true;
};

class AdapterRegistry {
 public:
  void add(std::string name, Adapter adapter);
  bool contains(std::string_view name) const;
  const Adapter& get(std::string_view name) const;  // ConfigError if absent
  std::vector<std::string> names() const;

 private:
  std::map<std::string, Adapter, std::less<>> adapters_;
};

/// Runs a registered adapter and passes its value through untouched.
MetricValue external_metric(const AdapterRegistry& registry, std::string_view adapter_name,
                            const ExternalInput& input);

// ---------------------------------------------------------------------------
// Named access, used by the re-ranking sweep and the CLI
// ---------------------------------------------------------------------------

/// Reference-based metrics available by name: "bleu4", "rouge1", "rougeL".
bool is_reference_metric(std::string_view name);

/// Scores a candidate question against the instance reference.
/// Throws ReferenceRequiredError when the instance has none.
MetricValue reference_metric(std::string_view name, std::string_view candidate,
                             const QGInstance& instance);

}  // namespace rquge::baselines
