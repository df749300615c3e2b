#include "rquge/rerank.hpp"

#include <algorithm>

#include "rquge/baselines.hpp"
#include "rquge/error.hpp"

namespace rquge::rerank {

std::vector<std::pair<CandidateQuestion, std::size_t>> sort_by_ppl(const QGInstance& instance) {
  std::vector<std::pair<CandidateQuestion, std::size_t>> out;
  for (std::size_t i = 0; i < instance.candidates.size(); ++i) {
    const auto& c = instance.candidates[i];
    if (!c.ppl) {
      throw ValidationError(instance.id, "candidates.ppl",
                            "candidate " + std::to_string(i) + " has no perplexity");
    }
    out.emplace_back(c, i);
  }
  std::stable_sort(out.begin(), out.end(),
                   [](const auto& a, const auto& b) { return *a.first.ppl < *b.first.ppl; });
  return out;
}

std::size_t select_best(std::span<const ScoredCandidate> scored, std::size_t k) {
  if (k == 0 || k > scored.size()) throw PreconditionError("k outside the scored prefix");
  std::size_t best = 0;
  for (std::size_t i = 1; i < k; ++i) {
    const auto& a = scored[i];
    const auto& b = scored[best];
    if (a.score.kappa > b.score.kappa ||
        (a.score.kappa == b.score.kappa && *a.candidate.ppl < *b.candidate.ppl)) {
      best = i;
    }
  }
  return best;
}

namespace {

RerankResult make_result(const std::string& id, const std::vector<ScoredCandidate>& scored, int k) {
  const auto ku = static_cast<std::size_t>(k);
  const std::size_t best = select_best(scored, ku);
  RerankResult r;
  r.instance_id = id;
  r.k = k;
  r.chosen = scored[best].candidate;
  r.chosen_score = scored[best].score;
  r.ppl_best = scored.front().candidate;
  r.all_scored.assign(scored.begin(), scored.begin() + static_cast<std::ptrdiff_t>(ku));
  return r;
}

std::vector<ScoredCandidate> score_prefix(const QGInstance& instance, int k, const Rquge& metric) {
  if (instance.candidates.empty()) {
    throw PreconditionError("instance '" + instance.id + "' has no candidates to re-rank");
  }
  const auto sorted = sort_by_ppl(instance);
  if (k < 1 || static_cast<std::size_t>(k) > sorted.size()) {
    throw PreconditionError("instance '" + instance.id + "': k=" + std::to_string(k) +
                            " outside [1, " + std::to_string(sorted.size()) + "]");
  }
  std::vector<std::pair<const QGInstance*, std::string>> items;
  for (int i = 0; i < k; ++i) items.emplace_back(&instance, sorted[static_cast<std::size_t>(i)].first.text);
  std::vector<RqugeScore> scores;
  try {
    scores = metric.score_many(items);
  } catch (const RunnerError& e) {
    throw e.tagged(instance.id);
  }
  std::vector<ScoredCandidate> out;
  for (int i = 0; i < k; ++i) {
    const auto u = static_cast<std::size_t>(i);
    out.push_back(ScoredCandidate{sorted[u].first, std::move(scores[u]), sorted[u].second});
  }
  return out;
}

}  // namespace

RerankResult rerank(const QGInstance& instance, int k, const Rquge& metric) {
  return make_result(instance.id, score_prefix(instance, k, metric), k);
}

SweepReport rerank_sweep(std::span<const QGInstance> instances, std::span<const int> ks,
                         const Rquge& metric, std::span<const std::string> baseline_metrics) {
  if (ks.empty()) throw PreconditionError("ks must not be empty");
  for (std::size_t i = 0; i < ks.size(); ++i) {
    if (ks[i] < 1) throw PreconditionError("every k must be at least 1");
    if (i > 0 && ks[i] <= ks[i - 1]) throw PreconditionError("ks must be strictly ascending");
  }
  for (const auto& m : baseline_metrics) {
    if (!baselines::is_reference_metric(m)) throw ConfigError("unknown baseline metric '" + m + "'");
  }

  // Column 0 is always k = 1, the reference point for relative values.
  std::vector<int> all_ks;
  if (ks.front() != 1) all_ks.push_back(1);
  all_ks.insert(all_ks.end(), ks.begin(), ks.end());

  SweepReport report;
  std::vector<double> kappa_sum(all_ks.size(), 0.0);
  std::vector<std::map<std::string, double>> metric_sum(all_ks.size());
  for (const auto& inst : instances) {
    const auto scored = score_prefix(inst, all_ks.back(), metric);
    std::vector<RerankResult> per_k;
    for (std::size_t j = 0; j < all_ks.size(); ++j) {
      auto r = make_result(inst.id, scored, all_ks[j]);
      kappa_sum[j] += r.chosen_score.kappa;
      for (const auto& m : baseline_metrics) {
        metric_sum[j][m] += baselines::reference_metric(m, r.chosen.text, inst).value;
      }
      per_k.push_back(std::move(r));
    }
    if (all_ks.size() != ks.size()) per_k.erase(per_k.begin());
    report.chosen.push_back(std::move(per_k));
  }

  const double n = static_cast<double>(instances.size());
  const auto mean = [&](double sum) { return instances.empty() ? 0.0 : sum / n; };
  const std::size_t offset = all_ks.size() - ks.size();
  for (std::size_t j = offset; j < all_ks.size(); ++j) {
    SweepRow row;
    row.k = all_ks[j];
    row.mean_kappa = mean(kappa_sum[j]);
    const double base_kappa = mean(kappa_sum[0]);
    row.relative_kappa = base_kappa > 0.0 ? (row.mean_kappa - base_kappa) / base_kappa : 0.0;
    for (const auto& m : baseline_metrics) {
      const double v = mean(metric_sum[j][m]);
      const double base = mean(metric_sum[0][m]);
      row.baseline_means[m] = v;
      row.baseline_relative[m] =
          base != 0.0 ? std::optional<double>((v - base) / base)
                      : (v == 0.0 ? std::optional<double>(0.0) : std::nullopt);
    }
    report.rows.push_back(std::move(row));
  }
  return report;
}

bool is_redundant(std::span<const RerankResult> choices_across_k) {
  if (choices_across_k.empty()) return false;
  return std::all_of(choices_across_k.begin(), choices_across_k.end(), [&](const RerankResult& r) {
    return r.chosen.text == choices_across_k.front().chosen.text;
  });
}

Json to_json(const SweepRow& row) {
  Json j;
  j["k"] = row.k;
  j["mean_kappa"] = row.mean_kappa;
  j["relative_kappa"] = row.relative_kappa;
  Json means = Json::object();
  Json rel = Json::object();
  for (const auto& [m, v] : row.baseline_means) means[m] = v;
  for (const auto& [m, v] : row.baseline_relative) rel[m] = v ? Json(*v) : Json(nullptr);
  j["baseline_means"] = std::move(means);
  j["baseline_relative"] = std::move(rel);
  return j;
}

Json to_json(const RerankResult& r) {
  Json j;
  j["id"] = r.instance_id;
  j["k"] = r.k;
  j["chosen"] = r.chosen.text;
  j["kappa"] = r.chosen_score.kappa;
  j["predicted_answer"] = r.chosen_score.predicted_answer;
  j["chosen_ppl"] = r.chosen.ppl ? Json(*r.chosen.ppl) : Json(nullptr);
  j["ppl_best"] = r.ppl_best.text;
  return j;
}

}  // namespace rquge::rerank
