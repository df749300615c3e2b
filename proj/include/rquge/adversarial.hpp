#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "rquge/core.hpp"
#include "rquge/runtime.hpp"

// Positive (paraphrased) and negative (corrupted) variants of reference
// questions, and ROC-AUC of a metric separating the two.
namespace rquge::adversarial {

enum class CorruptionKind {
  paraphrase_backtranslate,
  paraphrase_model,
  negation,
  gender_reverse,
  entity_swap,
};

std::string to_string(CorruptionKind kind);
CorruptionKind corruption_kind_from_string(std::string_view s);  // ParseError on unknown
bool is_positive(CorruptionKind kind);
inline constexpr CorruptionKind kAllKinds[] = {
    CorruptionKind::paraphrase_backtranslate, CorruptionKind::paraphrase_model,
    CorruptionKind::negation, CorruptionKind::gender_reverse, CorruptionKind::entity_swap};
inline constexpr CorruptionKind kNegativeKinds[] = {
    CorruptionKind::negation, CorruptionKind::gender_reverse, CorruptionKind::entity_swap};

struct CorruptionRecord {
  std::string instance_id;
  std::string original;
  std::string corrupted;
  CorruptionKind kind = CorruptionKind::negation;
  int label = 0;  // 1 acceptable, 0 corrupted
  std::string edit_audit;

  bool operator==(const CorruptionRecord&) const = default;
};

struct Skip {
  CorruptionKind kind = CorruptionKind::negation;
  std::string reason;
};

using Outcome = std::variant<CorruptionRecord, Skip>;

Json to_json(const CorruptionRecord& record);
CorruptionRecord corruption_record_from_json(const Json& j);  // ValidationError on bad fields

// ---------------------------------------------------------------------------
// Corrupters
// ---------------------------------------------------------------------------

/// Antonym source for the negation corrupter.
class AntonymLexicon {
 public:
  virtual ~AntonymLexicon() = default;
  /// Antonym of a lowercase word, if known.
  virtual std::optional<std::string> antonym(std::string_view word) const = 0;
};

class TableAntonymLexicon : public AntonymLexicon {
 public:
  explicit TableAntonymLexicon(std::map<std::string, std::string, std::less<>> table);
  std::optional<std::string> antonym(std::string_view word) const override;

 private:
  std::map<std::string, std::string, std::less<>> table_;
};

/// Fixed 20-entry verb table, symmetric.
const TableAntonymLexicon& default_antonyms();

bool is_auxiliary(std::string_view lowercase_word);

/// Inserts "not" after the first auxiliary/modal or swaps a verb for its
/// antonym; a seeded coin decides when both apply.
Outcome corrupt_negate(std::string_view question, std::uint64_t seed,
                       const AntonymLexicon& lexicon = default_antonyms());

/// he<->she, him<->her, his<->hers, himself<->herself.
const std::map<std::string, std::string, std::less<>>& gender_table();

/// Flips every gendered pronoun. The seed is accepted for interface
/// uniformity; the mapping is deterministic.
Outcome corrupt_gender(std::string_view question, std::uint64_t seed);

/// Replaces one question entity with a same-type context entity of a
/// different surface form.
Outcome corrupt_entity_swap(std::string_view question, std::string_view context,
                            const runtime::NerRunner& ner, std::uint64_t seed);

enum class ParaphraseMethod { backtranslate, paraphraser };

struct ParaphraseRunners {
  const runtime::Translator* translator = nullptr;
  const runtime::Paraphraser* paraphraser = nullptr;
};

/// Label-1 paraphrase. Back-translation pivots through zh or fr (seeded) and
/// retries once through the other language; the paraphraser is retried once.
/// Skips when the output still equals the input.
Outcome paraphrase_positive(std::string_view question, ParaphraseMethod method,
                            const ParaphraseRunners& runners, std::uint64_t seed);

// ---------------------------------------------------------------------------
// Set construction
// ---------------------------------------------------------------------------

struct AdversarialRunners {
  const runtime::NerRunner* ner = nullptr;
  const runtime::Translator* translator = nullptr;
  const runtime::Paraphraser* paraphraser = nullptr;
  const AntonymLexicon* antonyms = nullptr;  // default_antonyms() when null
};

using KindCounts = std::map<CorruptionKind, std::size_t>;

/// negation 1000, gender_reverse 150, entity_swap 100, and as many positives
/// split evenly across the two paraphrase methods.
KindCounts default_counts();

/// Rescales a count map to `total` records with largest-remainder rounding.
KindCounts scale_counts(const KindCounts& counts, std::size_t total);

struct KindYield {
  std::size_t requested = 0;
  std::size_t produced = 0;
  std::map<std::string, std::size_t> skipped;  // reason -> count
};

struct AdversarialSet {
  std::vector<CorruptionRecord> records;  // grouped by kind, in kAllKinds order
  std::map<CorruptionKind, KindYield> yield;
  std::size_t instances_without_reference = 0;

  bool complete() const;
};

/// Each instance contributes at most one record per kind. Instances are
/// visited in a seeded order per kind. Pure in (instances, counts, seed).
AdversarialSet build_adversarial_set(std::span<const QGInstance> instances,
                                     const KindCounts& counts, std::uint64_t seed,
                                     const AdversarialRunners& runners);

Json yield_report(const AdversarialSet& set);

// ---------------------------------------------------------------------------
// Robustness AUC
// ---------------------------------------------------------------------------

/// Mann-Whitney AUC, ties credited 0.5. UndefinedError if either class is
/// empty.
double auc(std::span<const double> scores, std::span<const int> labels);

struct AucReport {
  double total = 0.0;
  std::map<CorruptionKind, double> per_kind;  // negative kinds present
};

/// `scores[i]` belongs to `records[i]`. Each per-kind value compares that
/// kind's negatives against the full positive pool.
AucReport robustness_auc(std::span<const CorruptionRecord> records, std::span<const double> scores);

Json to_json(const AucReport& report);

}  // namespace rquge::adversarial
