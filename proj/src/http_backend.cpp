#include "rquge/http_backend.hpp"

#include <httplib.h>

#include "rquge/error.hpp"

namespace rquge::http {

JsonEndpoint::JsonEndpoint(const std::string& url, int timeout_seconds)
    : url_(url), timeout_seconds_(timeout_seconds) {
  constexpr std::string_view kScheme = "http://";
  if (url.rfind(kScheme, 0) != 0) {
    throw ConfigError("endpoint '" + url + "' must start with http://");
  }
  const std::string rest = url.substr(kScheme.size());
  const auto slash = rest.find('/');
  const std::string authority = rest.substr(0, slash);
  path_ = slash == std::string::npos ? "/" : rest.substr(slash);
  const auto colon = authority.rfind(':');
  if (colon == std::string::npos) {
    host_ = authority;
  } else {
    host_ = authority.substr(0, colon);
    try {
      port_ = std::stoi(authority.substr(colon + 1));
    } catch (const std::exception&) {
      throw ConfigError("endpoint '" + url + "' has an invalid port");
    }
  }
  if (host_.empty()) throw ConfigError("endpoint '" + url + "' has no host");
}

Json JsonEndpoint::post(const Json& body) const { return post(std::string(), body); }

Json JsonEndpoint::post(const std::string& suffix, const Json& body) const {
  const std::string path = path_ == "/" && !suffix.empty() ? suffix : path_ + suffix;
  httplib::Client client(host_, port_);
  client.set_connection_timeout(timeout_seconds_);
  client.set_read_timeout(timeout_seconds_);
  auto res = client.Post(path, body.dump(), "application/json");
  if (!res) {
    throw Error("POST " + host_ + ":" + std::to_string(port_) + path + " failed: " +
                httplib::to_string(res.error()));
  }
  if (res->status != 200) {
    throw Error("POST " + path + " returned HTTP " + std::to_string(res->status) + ": " +
                res->body.substr(0, 200));
  }
  try {
    return Json::parse(res->body);
  } catch (const nlohmann::json::exception& e) {
    throw Error(std::string("invalid JSON response: ") + e.what());
  }
}

namespace {

Json qa_body(const runtime::QAInput& in) {
  return Json{{"question", in.question}, {"context", in.context}, {"input", in.assembled}};
}

}  // namespace

std::string HttpQABackend::answer(const runtime::QAInput& input) {
  return endpoint_.post(qa_body(input)).at("answer").get<std::string>();
}

std::vector<std::string> HttpQABackend::answer_batch(std::span<const runtime::QAInput> inputs) {
  Json batch = Json::array();
  for (const auto& in : inputs) batch.push_back(qa_body(in));
  auto res = endpoint_.post(Json{{"batch", std::move(batch)}});
  return res.at("answers").get<std::vector<std::string>>();
}

double HttpSpanScorerBackend::raw_score(const runtime::SpanScorerInput& in) {
  Json body{{"question", in.question}, {"gold", in.gold},     {"predicted", in.predicted},
            {"context", in.context},   {"input", in.assembled}};
  return endpoint_.post(body).at("score").get<double>();
}

std::vector<CandidateQuestion> HttpGeneratorBackend::sample(const runtime::GenerationRequest& r) {
  Json body{{"answer", r.answer.text},
            {"context", r.context},
            {"temperature", r.sampling.temperature},
            {"top_p", r.sampling.top_p},
            {"num_candidates", r.sampling.num_candidates},
            {"seed", r.seed}};
  const Json res = endpoint_.post(body);
  std::vector<CandidateQuestion> out;
  for (const auto& c : res.at("candidates")) {
    out.push_back(CandidateQuestion{c.at("text").get<std::string>(), c.at("ppl").get<double>(),
                                    CandidateSource::generated});
  }
  return out;
}

CandidateQuestion HttpGeneratorBackend::beam_search(const runtime::GenerationRequest& r,
                                                    int beam_size) {
  Json body{{"answer", r.answer.text}, {"context", r.context}, {"beam_size", beam_size}};
  auto res = endpoint_.post("/beam", body);
  return CandidateQuestion{res.at("text").get<std::string>(), res.at("ppl").get<double>(),
                           CandidateSource::generated};
}

std::vector<runtime::NerEntity> HttpNerBackend::entities(const std::string& text) {
  std::vector<runtime::NerEntity> out;
  const Json res = endpoint_.post(Json{{"text", text}});
  for (const auto& e : res.at("entities")) {
    out.push_back({e.at("surface").get<std::string>(), e.at("type").get<std::string>(),
                   e.at("char_start").get<std::size_t>()});
  }
  return out;
}

std::string HttpParaphraseBackend::paraphrase(const std::string& question) {
  return endpoint_.post(Json{{"question", question}}).at("text").get<std::string>();
}

std::string HttpTranslateBackend::translate(const std::string& text, const std::string& src,
                                            const std::string& tgt) {
  return endpoint_.post(Json{{"text", text}, {"src", src}, {"tgt", tgt}})
      .at("text")
      .get<std::string>();
}

}  // namespace rquge::http
