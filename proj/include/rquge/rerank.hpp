#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "rquge/core.hpp"
#include "rquge/metric.hpp"

namespace rquge::rerank {

struct ScoredCandidate {
  CandidateQuestion candidate;
  RqugeScore score;
  std::size_t original_index = 0;  // position in the instance's bag
};

struct RerankResult {
  std::string instance_id;
  int k = 1;
  CandidateQuestion chosen;
  RqugeScore chosen_score;
  CandidateQuestion ppl_best;
  std::vector<ScoredCandidate> all_scored;  // the K-prefix in ppl order
};

/// Candidates stably sorted by ascending perplexity. Throws ValidationError
/// if any candidate lacks a ppl.
std::vector<std::pair<CandidateQuestion, std::size_t>> sort_by_ppl(const QGInstance& instance);

/// Index into `scored` of the best entry among the first `k`: highest kappa,
/// then lower ppl, then earlier position.
std::size_t select_best(std::span<const ScoredCandidate> scored, std::size_t k);

/// Sorts the bag by ppl, scores the first k with RQUGE and returns the
/// argmax. k must be in [1, |candidates|].
RerankResult rerank(const QGInstance& instance, int k, const Rquge& metric);

struct SweepRow {
  int k = 1;
  double mean_kappa = 0.0;
  double relative_kappa = 0.0;  // (mean_k - mean_1) / mean_1
  std::map<std::string, double> baseline_means;
  std::map<std::string, std::optional<double>> baseline_relative;  // empty when mean_1 == 0
};

struct SweepReport {
  std::vector<SweepRow> rows;
  /// chosen[i][j]: the choice for instance i at ks[j].
  std::vector<std::vector<RerankResult>> chosen;
};

/// Re-ranks every instance at each k (ks ascending, each >= 1) and reports
/// the mean kappa and mean baseline metrics of the chosen candidates, also
/// relative to k = 1. Each instance is scored once over the largest prefix.
SweepReport rerank_sweep(std::span<const QGInstance> instances, std::span<const int> ks,
                         const Rquge& metric, std::span<const std::string> baseline_metrics);

/// True when the chosen question is the same string for every k, which
/// makes the instance useless for comparing selections.
bool is_redundant(std::span<const RerankResult> choices_across_k);

Json to_json(const SweepRow& row);
Json to_json(const RerankResult& result);

}  // namespace rquge::rerank
