#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "rquge/baselines.hpp"
#include "rquge/core.hpp"
#include "rquge/metric.hpp"
#include "rquge/runtime.hpp"

// Synthetic QA data: NER answer spans -> sampled questions -> selection ->
// SQuAD-style training records.
namespace rquge::synth {

enum class Selection { rquge, ppl, beam, external_adapter };

std::string_view to_string(Selection s);
Selection selection_from_string(std::string_view s);  // ConfigError on unknown

struct SynthContext {
  std::string id;
  std::string context;
};

/// Reads {"id", "context"} JSONL. Dataset records are accepted too; their
/// other fields are ignored.
std::vector<SynthContext> load_contexts(const std::filesystem::path& path);

struct SynthExample {
  std::string id;
  std::string context;
  AnswerSpan answer;  // char_start always set
  std::string question;
  double kappa = 0.0;
  Selection selection = Selection::rquge;

  bool operator==(const SynthExample&) const = default;
};

/// NER entities shorter than max_tokens whitespace tokens, deduplicated by
/// (surface, offset), in order of appearance. Entities whose offset does not
/// point at their surface are dropped.
std::vector<AnswerSpan> extract_answer_spans(std::string_view context, const runtime::NerRunner& ner,
                                             int max_tokens = 4);

struct SynthOptions {
  int k = 1;
  Selection selection = Selection::rquge;
  std::uint64_t seed = 0;
  bool all_spans = false;  // one example per span instead of one random span
  int max_answer_tokens = 4;
  int beam_size = 5;
  std::string adapter_name;  // for Selection::external_adapter
};

struct SynthRunners {
  const runtime::NerRunner* ner = nullptr;
  const runtime::Generator* generator = nullptr;
  const Rquge* metric = nullptr;
  const baselines::AdapterRegistry* adapters = nullptr;
};

struct SynthSkip {
  std::string id;
  std::string reason;
};

struct SynthResult {
  std::vector<SynthExample> examples;
  std::vector<SynthSkip> skipped;
};

/// Per context: a seeded span choice, a sampled candidate bag and a
/// question picked by the selection strategy. kappa is recorded for every
/// strategy so they can be compared. Deterministic under the seed.
SynthResult synthesize(std::span<const SynthContext> contexts, const SynthRunners& runners,
                       const SynthOptions& options);

/// {"id", "context", "question", "answer": {"text", "char_start"}, "kappa", "selection"}
Json training_record(const SynthExample& example);

/// One line per example; the file loads back with load_dataset.
void emit_training_file(const std::filesystem::path& path, std::span<const SynthExample> examples);

/// Hyper-parameters handed to an external QA trainer.
struct TrainerConfig {
  std::string architecture = "t5-small";
  int encoder_layers = 6;
  int decoder_layers = 6;
  int training_steps = 2000;
  double dropout = 0.1;
  double learning_rate = 3e-5;
  int batch_size = 32;
};

Json to_json(const TrainerConfig& config);
TrainerConfig trainer_config_from_json(const Json& j);  // ConfigError on bad fields

/// Fine-tuning happens outside this library.
class TrainerAdapter {
 public:
  virtual ~TrainerAdapter() = default;
  virtual void train(const std::filesystem::path& training_file, const TrainerConfig& config) = 0;
};

}  // namespace rquge::synth
