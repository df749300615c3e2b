#pragma once

#include <memory>
#include <string>

#include "rquge/core.hpp"
#include "rquge/runtime.hpp"

// JSON-over-HTTP backends for model servers. Each backend POSTs one JSON
// object per call and reads one JSON object back:
//
//   qa          {"question","context","input"}             -> {"answer": str}
//   qa batch    {"batch": [ {...}, ... ]}                  -> {"answers": [str]}
//   span scorer {"question","gold","predicted","context","input"} -> {"score": float}
//   generator   {"answer","context","temperature","top_p","num_candidates","seed"}
//                                                          -> {"candidates": [{"text","ppl"}]}
//   beam (path + "/beam")
//               {"answer","context","beam_size"}           -> {"text","ppl"}
//   ner         {"text"}                                   -> {"entities": [{"surface","type","char_start"}]}
//   paraphrase  {"question"}                               -> {"text": str}
//   translate   {"text","src","tgt"}                       -> {"text": str}
namespace rquge::http {

/// Minimal client for "http://host[:port]/path" endpoints.
class JsonEndpoint {
 public:
  explicit JsonEndpoint(const std::string& url, int timeout_seconds = 120);
  Json post(const Json& body) const;
  /// POSTs to the endpoint path with `suffix` appended.
  Json post(const std::string& suffix, const Json& body) const;
  const std::string& url() const { return url_; }

 private:
  std::string url_;
  std::string host_;
  int port_ = 80;
  std::string path_;
  int timeout_seconds_;
};

class HttpQABackend : public runtime::QABackend {
 public:
  explicit HttpQABackend(JsonEndpoint endpoint) : endpoint_(std::move(endpoint)) {}
  std::string answer(const runtime::QAInput& input) override;
  std::vector<std::string> answer_batch(std::span<const runtime::QAInput> inputs) override;

 private:
  JsonEndpoint endpoint_;
};

class HttpSpanScorerBackend : public runtime::SpanScorerBackend {
 public:
  explicit HttpSpanScorerBackend(JsonEndpoint endpoint) : endpoint_(std::move(endpoint)) {}
  double raw_score(const runtime::SpanScorerInput& input) override;

 private:
  JsonEndpoint endpoint_;
};

class HttpGeneratorBackend : public runtime::GeneratorBackend {
 public:
  explicit HttpGeneratorBackend(JsonEndpoint endpoint) : endpoint_(std::move(endpoint)) {}
  std::vector<CandidateQuestion> sample(const runtime::GenerationRequest& request) override;
  CandidateQuestion beam_search(const runtime::GenerationRequest& request, int beam_size) override;

 private:
  JsonEndpoint endpoint_;
};

class HttpNerBackend : public runtime::NerBackend {
 public:
  explicit HttpNerBackend(JsonEndpoint endpoint) : endpoint_(std::move(endpoint)) {}
  std::vector<runtime::NerEntity> entities(const std::string& text) override;

 private:
  JsonEndpoint endpoint_;
};

class HttpParaphraseBackend : public runtime::ParaphraseBackend {
 public:
  explicit HttpParaphraseBackend(JsonEndpoint endpoint) : endpoint_(std::move(endpoint)) {}
  std::string paraphrase(const std::string& question) override;

 private:
  JsonEndpoint endpoint_;
};

class HttpTranslateBackend : public runtime::TranslateBackend {
 public:
  explicit HttpTranslateBackend(JsonEndpoint endpoint) : endpoint_(std::move(endpoint)) {}
  std::string translate(const std::string& text, const std::string& src,
                        const std::string& tgt) override;

 private:
  JsonEndpoint endpoint_;
};

}  // namespace rquge::http
