#pragma once

#include <filesystem>
#include <memory>
#include <optional>
#include <string>

#include "rquge/cache.hpp"
#include "rquge/core.hpp"
#include "rquge/runtime.hpp"

namespace rquge::runtime {

/// One backend entry of the config file. `kind` is "http" or one of the
/// offline stubs: "stub-lexical" (QA), "stub-overlap" (span scorer),
/// "stub-template" (generator), "stub-heuristic" (NER), "stub-synonym"
/// (paraphraser and translator).
struct BackendConfig {
  std::string kind;
  std::string name;
  std::string url;  // http only
  std::size_t max_input_length = 512;
  std::string separator = "\n";
  bool concurrency_safe = false;
  int timeout_seconds = 120;
};

/// Backend wiring loaded from a JSON config file. Defaults name the
/// checkpoints the metric was designed around; an http server hosting them
/// has to be supplied by the user.
struct RuntimeConfig {
  BackendConfig qa{"http", "unifiedqa-v2-t5-large-1363200", "http://127.0.0.1:8701/qa"};
  BackendConfig scorer{"http", "roberta-quip-mocha-span-scorer", "http://127.0.0.1:8701/score"};
  BackendConfig generator{"http", "mixqg-base", "http://127.0.0.1:8701/generate"};
  BackendConfig ner{"http", "stanza-ner-en", "http://127.0.0.1:8701/ner"};
  BackendConfig paraphraser{"http", "t5-small-quora-paraphrase", "http://127.0.0.1:8701/paraphrase"};
  BackendConfig translator{"http", "marian-opus-mt", "http://127.0.0.1:8701/translate"};
  SamplingConfig sampling;
  std::optional<std::filesystem::path> cache_dir;
};

RuntimeConfig runtime_config_from_json(const Json& j);
Json to_json(const RuntimeConfig& config);
RuntimeConfig load_runtime_config(const std::filesystem::path& path);

/// A config whose every backend is an offline stub.
RuntimeConfig stub_runtime_config();

/// Runners are built lazily so that commands only touch the backends they use.
class Runtime {
 public:
  explicit Runtime(RuntimeConfig config);

  const RuntimeConfig& config() const { return config_; }
  std::shared_ptr<ResultCache> cache() const { return cache_; }

  std::shared_ptr<QARunner> qa();
  std::shared_ptr<SpanScorer> scorer();
  std::shared_ptr<Generator> generator();
  std::shared_ptr<NerRunner> ner();
  std::shared_ptr<Paraphraser> paraphraser();
  std::shared_ptr<Translator> translator();

  /// True when the QA runner and span scorer may be called concurrently.
  bool scoring_concurrency_safe();

 private:
  RuntimeConfig config_;
  std::shared_ptr<ResultCache> cache_;
  std::shared_ptr<QARunner> qa_;
  std::shared_ptr<SpanScorer> scorer_;
  std::shared_ptr<Generator> generator_;
  std::shared_ptr<NerRunner> ner_;
  std::shared_ptr<Paraphraser> paraphraser_;
  std::shared_ptr<Translator> translator_;
};

}  // namespace rquge::runtime
