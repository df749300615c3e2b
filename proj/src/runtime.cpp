#include "rquge/runtime.hpp"

#include <algorithm>
#include <cmath>
#include <exception>

#include <spdlog/spdlog.h>

#include "rquge/error.hpp"
#include "rquge/text.hpp"

namespace rquge::runtime {
namespace {

/// Runs a backend call, turning foreign exceptions into RunnerError.
template <typename F>
auto guarded(const std::string& runner, F&& f) {
  try {
    return f();
  } catch (const RunnerError&) {
    throw;
  } catch (const std::exception& e) {
    throw RunnerError(runner, e.what());
  }
}

void require_nonempty(std::string_view value, const char* what) {
  if (text::trim(value).empty()) throw PreconditionError(std::string(what) + " must be nonempty");
}

Json candidate_to_json(const CandidateQuestion& c) {
  Json j;
  j["text"] = c.text;
  if (c.ppl) j["ppl"] = *c.ppl;
  j["source"] = std::string(to_string(c.source));
  return j;
}

CandidateQuestion candidate_from_json(const Json& j) {
  CandidateQuestion c;
  c.text = j.at("text").get<std::string>();
  if (j.contains("ppl")) c.ppl = j.at("ppl").get<double>();
  c.source = candidate_source_from_string(j.at("source").get<std::string>());
  return c;
}

void check_candidate(const std::string& runner, const CandidateQuestion& c) {
  if (text::trim(c.text).empty()) throw RunnerError(runner, "generated an empty question");
  if (!c.ppl || !std::isfinite(*c.ppl) || *c.ppl <= 0.0) {
    throw RunnerError(runner, "generated a question without a finite positive ppl");
  }
}

}  // namespace

void SamplingConfig::validate() const {
  if (!std::isfinite(temperature) || temperature <= 0.0) {
    throw PreconditionError("sampling temperature must be positive");
  }
  if (!(top_p > 0.0 && top_p <= 1.0)) throw PreconditionError("top_p must be in (0, 1]");
  if (num_candidates < 1) throw PreconditionError("num_candidates must be at least 1");
}

std::vector<std::string> QABackend::answer_batch(std::span<const QAInput> inputs) {
  std::vector<std::string> out;
  out.reserve(inputs.size());
  for (const auto& in : inputs) out.push_back(answer(in));
  return out;
}

std::size_t QABackend::count_tokens(std::string_view text) const {
  return text::split_whitespace(text).size();
}

std::vector<double> SpanScorerBackend::raw_score_batch(std::span<const SpanScorerInput> inputs) {
  std::vector<double> out;
  out.reserve(inputs.size());
  for (const auto& in : inputs) out.push_back(raw_score(in));
  return out;
}

// ---------------------------------------------------------------------------
// QARunner
// ---------------------------------------------------------------------------

QARunner::QARunner(QARunnerHandle handle, std::shared_ptr<QABackend> backend,
                   std::shared_ptr<ResultCache> cache, std::string separator)
    : handle_(std::move(handle)),
      backend_(std::move(backend)),
      cache_(std::move(cache)),
      separator_(std::move(separator)),
      gate_(handle_.concurrency_safe) {
  if (handle_.name.empty()) throw ConfigError("QA runner name must be nonempty");
  if (handle_.max_input_length == 0) throw ConfigError("max_input_length must be positive");
  if (!backend_) throw ConfigError("QA runner '" + handle_.name + "' has no backend");
}

std::pair<QAInput, bool> QARunner::assemble(std::string_view question,
                                            std::string_view context) const {
  require_nonempty(question, "question");
  require_nonempty(context, "context");
  const std::string prefix = std::string(question) + separator_;
  const auto fits = [&](std::string_view ctx) {
    return backend_->count_tokens(prefix + std::string(ctx)) <= handle_.max_input_length;
  };
  if (fits(context)) {
    return {QAInput{std::string(question), std::string(context), prefix + std::string(context)},
            false};
  }

  // Keep the longest whitespace-delimited prefix of the context that fits.
  std::vector<std::size_t> word_ends;
  for (std::size_t i = 0; i < context.size(); ++i) {
    const bool here = !std::isspace(static_cast<unsigned char>(context[i]));
    const bool next = i + 1 < context.size() &&
                      !std::isspace(static_cast<unsigned char>(context[i + 1]));
    if (here && !next) word_ends.push_back(i + 1);
  }
  std::size_t lo = 0;  // words kept that are known to fit
  std::size_t hi = word_ends.size();
  while (lo < hi) {
    const std::size_t mid = (lo + hi + 1) / 2;
    if (fits(context.substr(0, word_ends[mid - 1]))) {
      lo = mid;
    } else {
      hi = mid - 1;
    }
  }
  if (lo == 0) {
    throw RunnerError(handle_.name, "question alone exceeds max_input_length (" +
                                        std::to_string(handle_.max_input_length) + " tokens)");
  }
  std::string kept(context.substr(0, word_ends[lo - 1]));
  spdlog::warn("{}: context truncated to {} of {} words to fit {} tokens", handle_.name, lo,
               word_ends.size(), handle_.max_input_length);
  return {QAInput{std::string(question), kept, prefix + kept}, true};
}

QAResult QARunner::answer(std::string_view question, std::string_view context) const {
  auto [input, truncated] = assemble(question, context);
  const auto key = make_cache_key(handle_.name, "qa_answer", {input.assembled});
  Json value = cached(cache_.get(), key, [&] {
    return Json{{"answer", gate_.run([&] {
                   return guarded(handle_.name, [&] { return backend_->answer(input); });
                 })}};
  });
  return QAResult{AnswerSpan{text::trim(value.at("answer").get<std::string>()), std::nullopt},
                  truncated};
}

std::vector<QAResult> QARunner::answer_batch(
    std::span<const std::pair<std::string, std::string>> question_context) const {
  std::vector<QAInput> inputs;
  std::vector<bool> truncated;
  for (const auto& [q, c] : question_context) {
    auto [input, t] = assemble(q, c);
    inputs.push_back(std::move(input));
    truncated.push_back(t);
  }
  std::vector<std::optional<std::string>> answers(inputs.size());
  std::vector<CacheKey> keys;
  std::vector<std::size_t> missing;
  std::vector<QAInput> to_run;
  for (std::size_t i = 0; i < inputs.size(); ++i) {
    keys.push_back(make_cache_key(handle_.name, "qa_answer", {inputs[i].assembled}));
    if (cache_) {
      if (auto hit = cache_->get(keys.back())) {
        answers[i] = hit->at("answer").get<std::string>();
        continue;
      }
    }
    missing.push_back(i);
    to_run.push_back(inputs[i]);
  }
  if (!to_run.empty()) {
    auto produced = gate_.run([&] {
      return guarded(handle_.name, [&] { return backend_->answer_batch(to_run); });
    });
    if (produced.size() != to_run.size()) {
      throw RunnerError(handle_.name, "batch returned " + std::to_string(produced.size()) +
                                          " answers for " + std::to_string(to_run.size()) +
                                          " inputs");
    }
    for (std::size_t j = 0; j < missing.size(); ++j) {
      if (cache_) cache_->put(keys[missing[j]], Json{{"answer", produced[j]}});
      answers[missing[j]] = std::move(produced[j]);
    }
  }
  std::vector<QAResult> out;
  for (std::size_t i = 0; i < inputs.size(); ++i) {
    out.push_back(QAResult{AnswerSpan{text::trim(*answers[i]), std::nullopt}, truncated[i]});
  }
  return out;
}

// ---------------------------------------------------------------------------
// SpanScorer
// ---------------------------------------------------------------------------

std::string assemble_span_scorer_input(std::string_view question, std::string_view gold,
                                       std::string_view predicted, std::string_view context) {
  std::string s = "[CLS] ";
  s += question;
  s += " [q] ";
  s += gold;
  s += " [r] ";
  s += predicted;
  s += " [c] ";
  s += context;
  return s;
}

SpanScorer::SpanScorer(SpanScorerHandle handle, std::shared_ptr<SpanScorerBackend> backend,
                       std::shared_ptr<ResultCache> cache)
    : handle_(std::move(handle)),
      backend_(std::move(backend)),
      cache_(std::move(cache)),
      gate_(handle_.concurrency_safe) {
  if (handle_.name.empty()) throw ConfigError("span scorer name must be nonempty");
  if (!(handle_.score_min < handle_.score_max)) {
    throw ConfigError("span scorer '" + handle_.name + "': score_min must be below score_max");
  }
  if (!backend_) throw ConfigError("span scorer '" + handle_.name + "' has no backend");
}

SpanScorerInput SpanScorer::make_input(std::string_view question, std::string_view gold,
                                       std::string_view predicted,
                                       std::string_view context) const {
  require_nonempty(question, "question");
  require_nonempty(gold, "gold answer");
  require_nonempty(predicted, "predicted answer");
  require_nonempty(context, "context");
  return SpanScorerInput{std::string(question), std::string(gold), std::string(predicted),
                         std::string(context),
                         assemble_span_scorer_input(question, gold, predicted, context)};
}

double SpanScorer::clamp(double raw) const {
  if (std::isnan(raw)) throw RunnerError(handle_.name, "backend returned NaN");
  return std::clamp(raw, handle_.score_min, handle_.score_max);
}

double SpanScorer::score(std::string_view question, std::string_view gold,
                         std::string_view predicted, std::string_view context) const {
  const auto input = make_input(question, gold, predicted, context);
  const auto key = make_cache_key(handle_.name, "span_score", {input.assembled});
  Json value = cached(cache_.get(), key, [&] {
    return Json{{"raw", gate_.run([&] {
                   return guarded(handle_.name, [&] { return backend_->raw_score(input); });
                 })}};
  });
  return clamp(value.at("raw").get<double>());
}

std::vector<double> SpanScorer::score_batch(std::span<const Item> items) const {
  std::vector<SpanScorerInput> inputs;
  for (const auto& it : items) {
    inputs.push_back(make_input(it.question, it.gold, it.predicted, it.context));
  }
  std::vector<std::optional<double>> raw(inputs.size());
  std::vector<CacheKey> keys;
  std::vector<std::size_t> missing;
  std::vector<SpanScorerInput> to_run;
  for (std::size_t i = 0; i < inputs.size(); ++i) {
    keys.push_back(make_cache_key(handle_.name, "span_score", {inputs[i].assembled}));
    if (cache_) {
      if (auto hit = cache_->get(keys.back())) {
        raw[i] = hit->at("raw").get<double>();
        continue;
      }
    }
    missing.push_back(i);
    to_run.push_back(inputs[i]);
  }
  if (!to_run.empty()) {
    auto produced = gate_.run([&] {
      return guarded(handle_.name, [&] { return backend_->raw_score_batch(to_run); });
    });
    if (produced.size() != to_run.size()) {
      throw RunnerError(handle_.name, "batch returned the wrong number of scores");
    }
    for (std::size_t j = 0; j < missing.size(); ++j) {
      if (cache_) cache_->put(keys[missing[j]], Json{{"raw", produced[j]}});
      raw[missing[j]] = produced[j];
    }
  }
  std::vector<double> out;
  for (const auto& r : raw) out.push_back(clamp(*r));
  return out;
}

// ---------------------------------------------------------------------------
// Generator
// ---------------------------------------------------------------------------

Generator::Generator(GeneratorHandle handle, std::shared_ptr<GeneratorBackend> backend,
                     std::shared_ptr<ResultCache> cache)
    : handle_(std::move(handle)),
      backend_(std::move(backend)),
      cache_(std::move(cache)),
      gate_(handle_.concurrency_safe) {
  if (handle_.name.empty()) throw ConfigError("generator name must be nonempty");
  if (!backend_) throw ConfigError("generator '" + handle_.name + "' has no backend");
}

std::vector<CandidateQuestion> Generator::generate_candidates(const AnswerSpan& answer,
                                                              std::string_view context,
                                                              std::uint64_t seed) const {
  handle_.sampling.validate();
  require_nonempty(answer.text, "answer");
  require_nonempty(context, "context");
  const auto& s = handle_.sampling;
  const auto key = make_cache_key(
      handle_.name, "generate_candidates",
      {answer.text, answer.char_start ? std::to_string(*answer.char_start) : std::string("-"),
       context, Json(s.temperature).dump(), Json(s.top_p).dump(),
       std::to_string(s.num_candidates), std::to_string(seed)});
  Json value = cached(cache_.get(), key, [&] {
    GenerationRequest req{answer, std::string(context), s, seed};
    auto cands = gate_.run([&] {
      return guarded(handle_.name, [&] { return backend_->sample(req); });
    });
    if (cands.size() != static_cast<std::size_t>(s.num_candidates)) {
      throw RunnerError(handle_.name, "returned " + std::to_string(cands.size()) +
                                          " candidates, expected " +
                                          std::to_string(s.num_candidates));
    }
    Json arr = Json::array();
    for (const auto& c : cands) {
      check_candidate(handle_.name, c);
      arr.push_back(candidate_to_json(c));
    }
    return arr;
  });
  std::vector<CandidateQuestion> out;
  for (const auto& j : value) out.push_back(candidate_from_json(j));
  return out;
}

CandidateQuestion Generator::beam_search(const AnswerSpan& answer, std::string_view context,
                                         int beam_size) const {
  if (beam_size < 1) throw PreconditionError("beam_size must be at least 1");
  require_nonempty(answer.text, "answer");
  require_nonempty(context, "context");
  const auto key = make_cache_key(handle_.name, "beam_search",
                                  {answer.text, context, std::to_string(beam_size)});
  Json value = cached(cache_.get(), key, [&] {
    GenerationRequest req{answer, std::string(context), handle_.sampling, 0};
    auto c = gate_.run([&] {
      return guarded(handle_.name, [&] { return backend_->beam_search(req, beam_size); });
    });
    check_candidate(handle_.name, c);
    return candidate_to_json(c);
  });
  return candidate_from_json(value);
}

// ---------------------------------------------------------------------------
// Auxiliary runners
// ---------------------------------------------------------------------------

NerRunner::NerRunner(AuxHandle handle, std::shared_ptr<NerBackend> backend,
                     std::shared_ptr<ResultCache> cache)
    : handle_(std::move(handle)),
      backend_(std::move(backend)),
      cache_(std::move(cache)),
      gate_(handle_.concurrency_safe) {
  if (handle_.name.empty()) throw ConfigError("NER runner name must be nonempty");
  if (!backend_) throw ConfigError("NER runner '" + handle_.name + "' has no backend");
}

std::vector<NerEntity> NerRunner::entities(std::string_view text) const {
  const auto key = make_cache_key(handle_.name, "ner_entities", {text});
  Json value = cached(cache_.get(), key, [&] {
    auto ents = gate_.run([&] {
      return guarded(handle_.name, [&] { return backend_->entities(std::string(text)); });
    });
    Json arr = Json::array();
    for (const auto& e : ents) {
      if (e.surface.empty()) throw RunnerError(handle_.name, "entity with empty surface");
      arr.push_back(Json{{"surface", e.surface}, {"type", e.type}, {"char_start", e.char_start}});
    }
    return arr;
  });
  std::vector<NerEntity> out;
  for (const auto& j : value) {
    out.push_back(NerEntity{j.at("surface").get<std::string>(), j.at("type").get<std::string>(),
                            j.at("char_start").get<std::size_t>()});
  }
  return out;
}

Paraphraser::Paraphraser(AuxHandle handle, std::shared_ptr<ParaphraseBackend> backend,
                         std::shared_ptr<ResultCache> cache)
    : handle_(std::move(handle)),
      backend_(std::move(backend)),
      cache_(std::move(cache)),
      gate_(handle_.concurrency_safe) {
  if (handle_.name.empty()) throw ConfigError("paraphraser name must be nonempty");
  if (!backend_) throw ConfigError("paraphraser '" + handle_.name + "' has no backend");
}

std::string Paraphraser::paraphrase(std::string_view question) const {
  require_nonempty(question, "question");
  const auto key = make_cache_key(handle_.name, "paraphrase", {question});
  Json value = cached(cache_.get(), key, [&] {
    return Json(gate_.run([&] {
      return guarded(handle_.name, [&] { return backend_->paraphrase(std::string(question)); });
    }));
  });
  return value.get<std::string>();
}

Translator::Translator(AuxHandle handle, std::shared_ptr<TranslateBackend> backend,
                       std::shared_ptr<ResultCache> cache)
    : handle_(std::move(handle)),
      backend_(std::move(backend)),
      cache_(std::move(cache)),
      gate_(handle_.concurrency_safe) {
  if (handle_.name.empty()) throw ConfigError("translator name must be nonempty");
  if (!backend_) throw ConfigError("translator '" + handle_.name + "' has no backend");
}

std::string Translator::translate(std::string_view text, std::string_view src,
                                  std::string_view tgt) const {
  require_nonempty(text, "text");
  const auto key = make_cache_key(handle_.name, "translate", {text, src, tgt});
  Json value = cached(cache_.get(), key, [&] {
    return Json(gate_.run([&] {
      return guarded(handle_.name, [&] {
        return backend_->translate(std::string(text), std::string(src), std::string(tgt));
      });
    }));
  });
  return value.get<std::string>();
}

}  // namespace rquge::runtime
