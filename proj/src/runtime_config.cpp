#include "rquge/runtime_config.hpp"

#include <fstream>

#include "rquge/error.hpp"
#include "rquge/http_backend.hpp"
#include "rquge/stubs.hpp"

namespace rquge::runtime {
namespace {

BackendConfig backend_from_json(const Json& j, BackendConfig base, const char* section) {
  if (!j.is_object()) throw ConfigError(std::string("config section '") + section + "' must be an object");
  try {
    if (j.contains("kind")) base.kind = j.at("kind").get<std::string>();
    if (j.contains("name")) base.name = j.at("name").get<std::string>();
    if (j.contains("url")) base.url = j.at("url").get<std::string>();
    if (j.contains("max_input_length")) base.max_input_length = j.at("max_input_length").get<std::size_t>();
    if (j.contains("separator")) base.separator = j.at("separator").get<std::string>();
    if (j.contains("concurrency_safe")) base.concurrency_safe = j.at("concurrency_safe").get<bool>();
    if (j.contains("timeout_seconds")) base.timeout_seconds = j.at("timeout_seconds").get<int>();
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("config section '") + section + "': " + e.what());
  }
  if (base.name.empty()) throw ConfigError(std::string("config section '") + section + "' needs a name");
  return base;
}

Json backend_to_json(const BackendConfig& b) {
  Json j{{"kind", b.kind}, {"name", b.name}};
  if (!b.url.empty()) j["url"] = b.url;
  j["max_input_length"] = b.max_input_length;
  j["separator"] = b.separator;
  j["concurrency_safe"] = b.concurrency_safe;
  j["timeout_seconds"] = b.timeout_seconds;
  return j;
}

[[noreturn]] void unknown_kind(const BackendConfig& b, const char* role) {
  throw ConfigError("backend kind '" + b.kind + "' is not available for " + role + " ('" +
                    b.name + "')");
}

http::JsonEndpoint endpoint(const BackendConfig& b) {
  return http::JsonEndpoint(b.url, b.timeout_seconds);
}

BackendConfig stub(std::string kind, std::string name) {
  BackendConfig b;
  b.kind = std::move(kind);
  b.name = std::move(name);
  b.concurrency_safe = true;
  return b;
}

}  // namespace

RuntimeConfig runtime_config_from_json(const Json& j) {
  if (!j.is_object()) throw ConfigError("config must be a JSON object");
  RuntimeConfig c;
  if (j.contains("qa")) c.qa = backend_from_json(j.at("qa"), c.qa, "qa");
  if (j.contains("scorer")) c.scorer = backend_from_json(j.at("scorer"), c.scorer, "scorer");
  if (j.contains("generator")) c.generator = backend_from_json(j.at("generator"), c.generator, "generator");
  if (j.contains("ner")) c.ner = backend_from_json(j.at("ner"), c.ner, "ner");
  if (j.contains("paraphraser")) c.paraphraser = backend_from_json(j.at("paraphraser"), c.paraphraser, "paraphraser");
  if (j.contains("translator")) c.translator = backend_from_json(j.at("translator"), c.translator, "translator");
  try {
    if (j.contains("sampling")) {
      const auto& s = j.at("sampling");
      if (s.contains("temperature")) c.sampling.temperature = s.at("temperature").get<double>();
      if (s.contains("top_p")) c.sampling.top_p = s.at("top_p").get<double>();
      if (s.contains("num_candidates")) c.sampling.num_candidates = s.at("num_candidates").get<int>();
    }
    if (j.contains("cache_dir") && !j.at("cache_dir").is_null()) {
      c.cache_dir = j.at("cache_dir").get<std::string>();
    }
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
  try {
    c.sampling.validate();
  } catch (const PreconditionError& e) {
    throw ConfigError(std::string("config sampling: ") + e.what());
  }
  return c;
}

Json to_json(const RuntimeConfig& c) {
  Json j;
  j["qa"] = backend_to_json(c.qa);
  j["scorer"] = backend_to_json(c.scorer);
  j["generator"] = backend_to_json(c.generator);
  j["ner"] = backend_to_json(c.ner);
  j["paraphraser"] = backend_to_json(c.paraphraser);
  j["translator"] = backend_to_json(c.translator);
  j["sampling"] = Json{{"temperature", c.sampling.temperature},
                       {"top_p", c.sampling.top_p},
                       {"num_candidates", c.sampling.num_candidates}};
  j["cache_dir"] = c.cache_dir ? Json(c.cache_dir->string()) : Json(nullptr);
  return j;
}

RuntimeConfig load_runtime_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config '" + path.string() + "'");
  try {
    return runtime_config_from_json(Json::parse(in));
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("config '" + path.string() + "': " + e.what());
  }
}

RuntimeConfig stub_runtime_config() {
  RuntimeConfig c;
  c.qa = stub("stub-lexical", "stub-lexical-qa-v1");
  c.scorer = stub("stub-overlap", "stub-overlap-scorer-v1");
  c.generator = stub("stub-template", "stub-template-generator-v1");
  c.ner = stub("stub-heuristic", "stub-heuristic-ner-v1");
  c.paraphraser = stub("stub-synonym", "stub-synonym-paraphraser-v1");
  c.translator = stub("stub-synonym", "stub-synonym-translator-v1");
  return c;
}

Runtime::Runtime(RuntimeConfig config) : config_(std::move(config)) {
  if (auto dir = resolve_cache_dir(config_.cache_dir)) cache_ = std::make_shared<ResultCache>(*dir);
}

std::shared_ptr<QARunner> Runtime::qa() {
  if (qa_) return qa_;
  const auto& b = config_.qa;
  std::shared_ptr<QABackend> backend;
  if (b.kind == "http") {
    backend = std::make_shared<http::HttpQABackend>(endpoint(b));
  } else if (b.kind == "stub-lexical") {
    backend = std::make_shared<stubs::LexicalQABackend>();
  } else {
    unknown_kind(b, "qa");
  }
  qa_ = std::make_shared<QARunner>(QARunnerHandle{b.name, b.max_input_length, b.concurrency_safe},
                                   backend, cache_, b.separator);
  return qa_;
}

std::shared_ptr<SpanScorer> Runtime::scorer() {
  if (scorer_) return scorer_;
  const auto& b = config_.scorer;
  std::shared_ptr<SpanScorerBackend> backend;
  if (b.kind == "http") {
    backend = std::make_shared<http::HttpSpanScorerBackend>(endpoint(b));
  } else if (b.kind == "stub-overlap") {
    backend = std::make_shared<stubs::OverlapSpanScorerBackend>();
  } else {
    unknown_kind(b, "scorer");
  }
  scorer_ = std::make_shared<SpanScorer>(SpanScorerHandle{b.name, 1.0, 5.0, b.concurrency_safe},
                                         backend, cache_);
  return scorer_;
}

std::shared_ptr<Generator> Runtime::generator() {
  if (generator_) return generator_;
  const auto& b = config_.generator;
  std::shared_ptr<GeneratorBackend> backend;
  if (b.kind == "http") {
    backend = std::make_shared<http::HttpGeneratorBackend>(endpoint(b));
  } else if (b.kind == "stub-template") {
    backend = std::make_shared<stubs::TemplateGeneratorBackend>();
  } else {
    unknown_kind(b, "generator");
  }
  generator_ = std::make_shared<Generator>(
      GeneratorHandle{b.name, config_.sampling, b.concurrency_safe}, backend, cache_);
  return generator_;
}

std::shared_ptr<NerRunner> Runtime::ner() {
  if (ner_) return ner_;
  const auto& b = config_.ner;
  std::shared_ptr<NerBackend> backend;
  if (b.kind == "http") {
    backend = std::make_shared<http::HttpNerBackend>(endpoint(b));
  } else if (b.kind == "stub-heuristic") {
    backend = std::make_shared<stubs::HeuristicNerBackend>();
  } else {
    unknown_kind(b, "ner");
  }
  ner_ = std::make_shared<NerRunner>(AuxHandle{b.name, b.concurrency_safe}, backend, cache_);
  return ner_;
}

std::shared_ptr<Paraphraser> Runtime::paraphraser() {
  if (paraphraser_) return paraphraser_;
  const auto& b = config_.paraphraser;
  std::shared_ptr<ParaphraseBackend> backend;
  if (b.kind == "http") {
    backend = std::make_shared<http::HttpParaphraseBackend>(endpoint(b));
  } else if (b.kind == "stub-synonym") {
    backend = std::make_shared<stubs::SynonymParaphraseBackend>(stubs::default_synonyms());
  } else {
    unknown_kind(b, "paraphraser");
  }
  paraphraser_ = std::make_shared<Paraphraser>(AuxHandle{b.name, b.concurrency_safe}, backend, cache_);
  return paraphraser_;
}

std::shared_ptr<Translator> Runtime::translator() {
  if (translator_) return translator_;
  const auto& b = config_.translator;
  std::shared_ptr<TranslateBackend> backend;
  if (b.kind == "http") {
    backend = std::make_shared<http::HttpTranslateBackend>(endpoint(b));
  } else if (b.kind == "stub-synonym") {
    // The outbound leg rewrites synonyms and the return leg is the identity,
    // so a round trip behaves like a light paraphrase.
    const auto& syn = stubs::default_synonyms();
    backend = std::make_shared<stubs::DictionaryTranslateBackend>(
        std::map<std::pair<std::string, std::string>, stubs::DictionaryTranslateBackend::Dictionary>{
            {{"en", "zh"}, syn}, {{"en", "fr"}, syn}});
  } else {
    unknown_kind(b, "translator");
  }
  translator_ = std::make_shared<Translator>(AuxHandle{b.name, b.concurrency_safe}, backend, cache_);
  return translator_;
}

bool Runtime::scoring_concurrency_safe() {
  return qa()->handle().concurrency_safe && scorer()->handle().concurrency_safe;
}

}  // namespace rquge::runtime
