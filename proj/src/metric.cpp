#include "rquge/metric.hpp"

#include <algorithm>
#include <atomic>
#include <future>
#include <thread>

#include "rquge/error.hpp"
#include "rquge/text.hpp"

namespace rquge {

double normalize(const RqugeScore& score) {
  if (!(score.kappa >= 1.0 && score.kappa <= 5.0)) {
    throw PreconditionError("kappa " + std::to_string(score.kappa) + " outside [1, 5]");
  }
  return (score.kappa - 1.0) / 4.0;
}

Rquge::Rquge(std::shared_ptr<const runtime::QARunner> qa,
             std::shared_ptr<const runtime::SpanScorer> scorer, RqugeOptions options)
    : qa_(std::move(qa)), scorer_(std::move(scorer)), options_(options) {
  if (!qa_ || !scorer_) throw ConfigError("RQUGE needs both a QA runner and a span scorer");
}

RqugeScore Rquge::finish(double kappa, std::string predicted, bool truncated) const {
  RqugeScore s{kappa, std::move(predicted), std::nullopt, truncated};
  if (options_.normalize) s.normalized = normalize(s);
  return s;
}

RqugeScore Rquge::score(const QGInstance& instance, std::string_view candidate) const {
  if (text::trim(candidate).empty()) {
    throw PreconditionError("instance '" + instance.id + "': candidate question is empty");
  }
  if (text::trim(instance.gold_answer.text).empty()) {
    throw PreconditionError("instance '" + instance.id + "': gold answer is missing");
  }
  try {
    auto qa = qa_->answer(candidate, instance.context);
    // An empty prediction shares nothing with the gold span.
    if (qa.answer.text.empty()) {
      return finish(scorer_->handle().score_min, "", qa.truncated);
    }
    const double kappa =
        scorer_->score(candidate, instance.gold_answer.text, qa.answer.text, instance.context);
    return finish(kappa, std::move(qa.answer.text), qa.truncated);
  } catch (const RunnerError& e) {
    throw e.tagged(instance.id);
  }
}

std::vector<RqugeScore> Rquge::score_many(
    std::span<const std::pair<const QGInstance*, std::string>> items) const {
  std::vector<std::pair<std::string, std::string>> qa_inputs;
  for (const auto& [inst, cand] : items) {
    if (text::trim(cand).empty()) {
      throw PreconditionError("instance '" + inst->id + "': candidate question is empty");
    }
    if (text::trim(inst->gold_answer.text).empty()) {
      throw PreconditionError("instance '" + inst->id + "': gold answer is missing");
    }
    qa_inputs.emplace_back(cand, inst->context);
  }
  const auto answers = qa_->answer_batch(qa_inputs);

  std::vector<runtime::SpanScorer::Item> to_score;
  std::vector<std::size_t> scored_index;
  for (std::size_t i = 0; i < items.size(); ++i) {
    if (answers[i].answer.text.empty()) continue;
    const auto* inst = items[i].first;
    to_score.push_back({items[i].second, inst->gold_answer.text, answers[i].answer.text,
                        inst->context});
    scored_index.push_back(i);
  }
  const auto kappas = scorer_->score_batch(to_score);

  std::vector<RqugeScore> out;
  out.reserve(items.size());
  for (std::size_t i = 0; i < items.size(); ++i) {
    out.push_back(finish(scorer_->handle().score_min, answers[i].answer.text, answers[i].truncated));
  }
  for (std::size_t j = 0; j < scored_index.size(); ++j) {
    auto& s = out[scored_index[j]];
    s = finish(kappas[j], std::move(s.predicted_answer), s.truncated);
  }
  return out;
}

RqugeScore rquge_score(const QGInstance& instance, std::string_view candidate,
                       const runtime::QARunner& qa, const runtime::SpanScorer& scorer) {
  // Non-owning aliases; the metric object does not outlive this call.
  Rquge metric(std::shared_ptr<const runtime::QARunner>(std::shared_ptr<void>(), &qa),
               std::shared_ptr<const runtime::SpanScorer>(std::shared_ptr<void>(), &scorer));
  return metric.score(instance, candidate);
}

namespace selectors {

CandidateSelector all_candidates() {
  return [](const QGInstance& inst) {
    if (inst.candidates.empty()) {
      throw PreconditionError("instance '" + inst.id + "' has no candidates");
    }
    std::vector<std::string> out;
    for (const auto& c : inst.candidates) out.push_back(c.text);
    return out;
  };
}

CandidateSelector first_candidate() {
  return [](const QGInstance& inst) {
    if (inst.candidates.empty()) {
      throw PreconditionError("instance '" + inst.id + "' has no candidates");
    }
    return std::vector<std::string>{inst.candidates.front().text};
  };
}

CandidateSelector reference_question() {
  return [](const QGInstance& inst) {
    if (!inst.reference_question) {
      throw PreconditionError("instance '" + inst.id + "' has no reference question");
    }
    return std::vector<std::string>{*inst.reference_question};
  };
}

CandidateSelector by_name(std::string_view name) {
  if (name == "all") return all_candidates();
  if (name == "first") return first_candidate();
  if (name == "reference") return reference_question();
  throw ConfigError("unknown candidate selection '" + std::string(name) +
                    "' (expected all, first or reference)");
}

}  // namespace selectors

std::vector<BatchRow> rquge_batch(std::span<const QGInstance> instances,
                                  const CandidateSelector& selector, const Rquge& metric,
                                  BatchOptions options) {
  if (options.batch_size < 1) throw PreconditionError("batch_size must be at least 1");

  std::vector<BatchRow> rows;
  std::vector<std::pair<const QGInstance*, std::string>> items;
  std::vector<std::size_t> item_row;
  for (const auto& inst : instances) {
    std::vector<std::string> cands;
    try {
      cands = selector(inst);
    } catch (const Error& e) {
      rows.push_back(BatchRow{inst.id, "", std::nullopt, e.what()});
      continue;
    }
    for (auto& c : cands) {
      item_row.push_back(rows.size());
      rows.push_back(BatchRow{inst.id, c, std::nullopt, ""});
      items.emplace_back(&inst, std::move(c));
    }
  }

  const std::size_t n_chunks = (items.size() + options.batch_size - 1) / options.batch_size;
  const auto run_chunk = [&](std::size_t chunk) {
    const std::size_t first = chunk * options.batch_size;
    const std::size_t last = std::min(items.size(), first + options.batch_size);
    std::span<const std::pair<const QGInstance*, std::string>> slice(items.data() + first,
                                                                     last - first);
    try {
      auto scores = metric.score_many(slice);
      for (std::size_t i = first; i < last; ++i) rows[item_row[i]].score = std::move(scores[i - first]);
      return;
    } catch (const Error&) {
      // Fall through and isolate the failing items one by one.
    }
    for (std::size_t i = first; i < last; ++i) {
      try {
        rows[item_row[i]].score = metric.score(*items[i].first, items[i].second);
      } catch (const Error& e) {
        rows[item_row[i]].error = e.what();
      }
    }
  };

  const bool parallel = options.jobs > 1 && metric.qa().handle().concurrency_safe &&
                        metric.scorer().handle().concurrency_safe && n_chunks > 1;
  if (!parallel) {
    for (std::size_t c = 0; c < n_chunks; ++c) run_chunk(c);
    return rows;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::future<void>> workers;
  const std::size_t n_workers = std::min(options.jobs, n_chunks);
  for (std::size_t w = 0; w < n_workers; ++w) {
    workers.push_back(std::async(std::launch::async, [&] {
      for (std::size_t c = next++; c < n_chunks; c = next++) run_chunk(c);
    }));
  }
  for (auto& f : workers) f.get();
  return rows;
}

Json to_json(const BatchRow& row) {
  Json j;
  j["id"] = row.id;
  j["candidate"] = row.candidate;
  if (!row.score) {
    j["error"] = row.error;
    return j;
  }
  j["kappa"] = row.score->kappa;
  j["predicted_answer"] = row.score->predicted_answer;
  if (row.score->normalized) j["normalized"] = *row.score->normalized;
  j["truncated"] = row.score->truncated;
  return j;
}

}  // namespace rquge
