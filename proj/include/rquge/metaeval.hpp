#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "rquge/core.hpp"

// Correlation with human judgement and annotator agreement.
namespace rquge::metaeval {

/// Product-moment correlation. Needs |x| = |y| >= 3 (PreconditionError);
/// a constant argument raises UndefinedError.
double pearson(std::span<const double> x, std::span<const double> y);

/// 1-based ranks; tied values share their mean rank.
std::vector<double> average_ranks(std::span<const double> x);

/// Pearson over average ranks.
double spearman(std::span<const double> x, std::span<const double> y);

/// Tau-b, O(n log n).
double kendall(std::span<const double> x, std::span<const double> y);

/// (p_o - p_e) / (1 - p_e) over nominal labels. UndefinedError when p_e = 1.
double cohens_kappa(std::span<const int> a, std::span<const int> b);

struct MetricScore {
  std::string instance_id;
  double value = 0.0;
};

struct CorrelationReport {
  std::string metric_name;
  Criterion criterion = Criterion::answerability;
  double pearson = 0.0;
  double spearman = 0.0;
  double kendall = 0.0;
  std::size_t n = 0;
  std::vector<std::string> excluded_ids;  // scored but never annotated
};

/// Correlates metric values with the per-instance mean rating of one
/// criterion. Unannotated instances are excluded and listed.
CorrelationReport correlate_with_human(std::string metric_name, std::span<const MetricScore> scores,
                                       std::span<const AnnotationRecord> annotations,
                                       Criterion criterion);

Json to_json(const CorrelationReport& report);

struct PairAgreement {
  std::string annotator_a;
  std::string annotator_b;
  std::size_t shared = 0;
  std::optional<double> kappa;  // empty when undefined for this pair
};

struct AgreementReport {
  std::vector<PairAgreement> pairs;
  std::optional<double> mean_kappa;  // over pairs with a defined kappa
};

/// Cohen's kappa between every annotator pair on the instances both rated,
/// using the sum of the three criteria as a nominal label.
AgreementReport annotator_agreement(std::span<const AnnotationRecord> annotations);

Json to_json(const AgreementReport& report);

/// One row per metric, three criteria by (r, rho, tau). Reports for the same
/// metric are merged into one row in first-seen order.
std::string table_csv(std::span<const CorrelationReport> reports);
Json table_json(std::span<const CorrelationReport> reports);

}  // namespace rquge::metaeval
