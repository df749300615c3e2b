#include <gtest/gtest.h>

#include <algorithm>
#include <numeric>

#include "rquge/baselines.hpp"
#include "rquge/error.hpp"
#include "rquge/rerank.hpp"
#include "support/fixtures.hpp"
#include "support/generators.hpp"

using namespace rquge;
using rquge::rerank::rerank_sweep;
using rquge::rerank::RerankResult;
using rquge::rerank::is_redundant;
using rquge::rerank::to_json;

namespace {

QGInstance bag(const std::string& id, std::vector<std::pair<std::string, double>> cands) {
  QGInstance inst;
  inst.id = id;
  inst.context = "Context for " + id + ".";
  inst.gold_answer = {"gold", std::nullopt};
  inst.reference_question = "Where is the tower?";
  for (auto& [t, p] : cands) inst.candidates.push_back({t, p, CandidateSource::generated});
  return inst;
}

/// Echo QA plus a question -> kappa table.
Rquge table_metric(const std::vector<QGInstance>& data, std::map<std::string, double> table) {
  auto echo = std::make_shared<fixture::EchoQABackend>();
  for (const auto& d : data) echo->add(d.context, d.gold_answer.text);
  return Rquge(fixture::qa_runner(echo),
               fixture::scorer(std::make_shared<fixture::TableScorerBackend>(std::move(table))));
}

std::vector<QGInstance> stub_bags(std::uint64_t seed, std::size_t n, std::size_t cands) {
  gen::Engine e(seed);
  std::vector<QGInstance> out;
  for (std::size_t i = 0; i < n; ++i) out.push_back(gen::instance(e, "b" + std::to_string(i), cands));
  return out;
}

}  // namespace

TEST(Rerank, PicksHighestKappaInPrefix) {
  const std::vector<QGInstance> data{bag("x", {{"q1?", 1.0}, {"q2?", 2.0}, {"q3?", 3.0}})};
  auto metric = table_metric(data, {{"q1?", 2.0}, {"q2?", 4.0}, {"q3?", 3.0}});
  const auto r = rerank::rerank(data[0], 3, metric);
  EXPECT_EQ(r.chosen.text, "q2?");
  EXPECT_DOUBLE_EQ(r.chosen_score.kappa, 4.0);
  EXPECT_EQ(r.ppl_best.text, "q1?");
  ASSERT_EQ(r.all_scored.size(), 3u);
  double best = 0;
  for (const auto& s : r.all_scored) best = std::max(best, s.score.kappa);
  EXPECT_DOUBLE_EQ(r.chosen_score.kappa, best);
}

TEST(Rerank, SortsByPerplexityFirst) {
  // Bag order differs from ppl order; k=2 sees only the two lowest ppl.
  const std::vector<QGInstance> data{bag("x", {{"hi?", 9.0}, {"mid?", 2.0}, {"lo?", 1.0}})};
  auto metric = table_metric(data, {{"hi?", 5.0}, {"mid?", 3.0}, {"lo?", 2.0}});
  EXPECT_EQ(rerank::rerank(data[0], 1, metric).chosen.text, "lo?");
  EXPECT_EQ(rerank::rerank(data[0], 2, metric).chosen.text, "mid?");
  EXPECT_EQ(rerank::rerank(data[0], 3, metric).chosen.text, "hi?");
  EXPECT_EQ(rerank::rerank(data[0], 3, metric).all_scored[0].original_index, 2u);
}

TEST(Rerank, KOneIsPerplexityBest) {
  auto metric = fixture::stub_metric();
  for (const auto& inst : stub_bags(12, 20, 10)) {
    const auto r = rerank::rerank(inst, 1, metric);
    EXPECT_EQ(r.chosen, r.ppl_best);
    const auto best = std::min_element(inst.candidates.begin(), inst.candidates.end(),
                                       [](const auto& a, const auto& b) { return *a.ppl < *b.ppl; });
    EXPECT_EQ(r.chosen.text, best->text);
  }
}

TEST(Rerank, TiesPreferLowerPplThenEarlierPosition) {
  const std::vector<QGInstance> data{bag("x", {{"a?", 3.0}, {"b?", 1.0}, {"c?", 1.0}, {"d?", 2.0}})};
  auto metric = table_metric(data, {{"a?", 4.0}, {"b?", 4.0}, {"c?", 4.0}, {"d?", 4.0}});
  EXPECT_EQ(rerank::rerank(data[0], 4, metric).chosen.text, "b?");
}

TEST(Rerank, LargerPrefixNeverLowersKappa) {
  auto metric = fixture::stub_metric();
  auto gen = fixture::stub_generator(50);
  gen::Engine e(5);
  for (int i = 0; i < 10; ++i) {
    auto inst = gen::instance(e, "g" + std::to_string(i), 0);
    inst.candidates = gen->generate_candidates(inst.gold_answer, inst.context, 100 + i);
    const double k5 = rerank::rerank(inst, 5, metric).chosen_score.kappa;
    const double k50 = rerank::rerank(inst, 50, metric).chosen_score.kappa;
    EXPECT_GE(k50, k5);
  }
}

TEST(Rerank, EqualPplPermutationsKeepTheChoice) {
  std::vector<std::pair<std::string, double>> base{{"p?", 1.0}, {"q?", 1.0}, {"r?", 1.0}, {"s?", 2.0}};
  const std::map<std::string, double> kappas{{"p?", 2.0}, {"q?", 4.5}, {"r?", 3.0}, {"s?", 5.0}};
  std::sort(base.begin(), base.begin() + 3);
  do {
    const std::vector<QGInstance> data{bag("x", base)};
    auto metric = table_metric(data, kappas);
    EXPECT_EQ(rerank::rerank(data[0], 3, metric).chosen.text, "q?");
  } while (std::next_permutation(base.begin(), base.begin() + 3));
}

TEST(Rerank, Preconditions) {
  auto metric = fixture::stub_metric();
  auto inst = bag("x", {{"a?", 1.0}, {"b?", 2.0}});
  EXPECT_THROW(rerank::rerank(inst, 0, metric), PreconditionError);
  EXPECT_THROW(rerank::rerank(inst, 3, metric), PreconditionError);
  inst.candidates[1].ppl.reset();
  try {
    rerank::rerank(inst, 1, metric);
    FAIL();
  } catch (const ValidationError& e) {
    EXPECT_EQ(e.record_id(), "x");
  }
  inst.candidates.clear();
  EXPECT_THROW(rerank::rerank(inst, 1, metric), PreconditionError);
}

TEST(Sweep, SingleKGivesZeroRelative) {
  auto metric = fixture::stub_metric();
  const auto data = stub_bags(1, 5, 4);
  const std::vector<int> ks{1};
  const std::vector<std::string> baselines{"bleu4"};
  const auto rep = rerank_sweep(data, ks, metric, baselines);
  ASSERT_EQ(rep.rows.size(), 1u);
  EXPECT_EQ(rep.rows[0].relative_kappa, 0.0);
  EXPECT_EQ(rep.rows[0].baseline_relative.at("bleu4"), 0.0);
}

TEST(Sweep, MatchesPrefixMaxOracle) {
  auto metric = fixture::stub_metric();
  const auto data = stub_bags(44, 25, 8);
  const std::vector<int> ks{1, 5};
  const auto rep = rerank_sweep(data, ks, metric, std::vector<std::string>{"rouge1"});

  double sum1 = 0, sum5 = 0, rouge5 = 0;
  for (const auto& inst : data) {
    std::vector<std::size_t> order(inst.candidates.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](auto a, auto b) { return *inst.candidates[a].ppl < *inst.candidates[b].ppl; });
    std::vector<double> k(order.size());
    for (std::size_t i = 0; i < order.size(); ++i) k[i] = metric.score(inst, inst.candidates[order[i]].text).kappa;
    sum1 += k[0];
    std::size_t arg = 0;
    for (std::size_t i = 1; i < 5; ++i) {
      if (k[i] > k[arg]) arg = i;
    }
    sum5 += k[arg];
    rouge5 += baselines::rouge(inst.candidates[order[arg]].text, *inst.reference_question,
                               baselines::RougeVariant::rouge1);
  }
  const double n = static_cast<double>(data.size());
  ASSERT_EQ(rep.rows.size(), 2u);
  EXPECT_NEAR(rep.rows[0].mean_kappa, sum1 / n, 1e-12);
  EXPECT_NEAR(rep.rows[1].mean_kappa, sum5 / n, 1e-12);
  EXPECT_NEAR(rep.rows[1].relative_kappa, (sum5 - sum1) / sum1, 1e-12);
  EXPECT_NEAR(rep.rows[1].baseline_means.at("rouge1"), rouge5 / n, 1e-12);
  EXPECT_GE(rep.rows[1].mean_kappa, rep.rows[0].mean_kappa);
}

TEST(Sweep, ReferenceMetricCanFallWhileKappaRises) {
  const std::vector<QGInstance> data{
      bag("d", {{"Where is the tower?", 1.0}, {"Which landmark rises above the plaza?", 2.0}})};
  auto metric = table_metric(data, {{"Where is the tower?", 2.0}, {"Which landmark rises above the plaza?", 5.0}});
  const std::vector<int> ks{1, 2};
  const auto rep = rerank_sweep(data, ks, metric, std::vector<std::string>{"bleu4"});
  EXPECT_GT(rep.rows[1].relative_kappa, 0.0);
  EXPECT_LT(rep.rows[1].baseline_means.at("bleu4"), rep.rows[0].baseline_means.at("bleu4"));
  ASSERT_TRUE(rep.rows[1].baseline_relative.at("bleu4").has_value());
  EXPECT_LT(*rep.rows[1].baseline_relative.at("bleu4"), 0.0);
}

TEST(Sweep, OmitsUnrequestedKOneFromChoices) {
  auto metric = fixture::stub_metric();
  const auto data = stub_bags(3, 4, 6);
  const std::vector<int> ks{2, 4};
  const auto rep = rerank_sweep(data, ks, metric, {});
  ASSERT_EQ(rep.rows.size(), 2u);
  EXPECT_EQ(rep.rows[0].k, 2);
  ASSERT_EQ(rep.chosen.size(), data.size());
  for (const auto& row : rep.chosen) {
    ASSERT_EQ(row.size(), 2u);
    EXPECT_EQ(row[0].k, 2);
    EXPECT_EQ(row[1].k, 4);
  }
}

TEST(Sweep, RejectsBadKsAndMetrics) {
  auto metric = fixture::stub_metric();
  const auto data = stub_bags(3, 2, 6);
  EXPECT_THROW(rerank_sweep(data, std::vector<int>{5, 1}, metric, {}), PreconditionError);
  EXPECT_THROW(rerank_sweep(data, std::vector<int>{}, metric, {}), PreconditionError);
  EXPECT_THROW(rerank_sweep(data, std::vector<int>{0, 1}, metric, {}), PreconditionError);
  EXPECT_THROW(rerank_sweep(data, std::vector<int>{1}, metric, std::vector<std::string>{"meteor"}), ConfigError);
}

TEST(Sweep, RedundancyIsExactStringEquality) {
  const std::vector<QGInstance> data{bag("x", {{"same?", 1.0}, {"other?", 2.0}})};
  auto flat = table_metric(data, {{"same?", 5.0}, {"other?", 1.0}});
  auto rising = table_metric(data, {{"same?", 1.0}, {"other?", 5.0}});
  std::vector<RerankResult> a{rerank::rerank(data[0], 1, flat), rerank::rerank(data[0], 2, flat)};
  std::vector<RerankResult> b{rerank::rerank(data[0], 1, rising), rerank::rerank(data[0], 2, rising)};
  EXPECT_TRUE(is_redundant(a));
  EXPECT_FALSE(is_redundant(b));
}

TEST(Sweep, JsonShapes) {
  const std::vector<QGInstance> data{bag("x", {{"same?", 1.0}, {"other?", 2.0}})};
  auto metric = table_metric(data, {{"same?", 2.0}, {"other?", 3.0}});
  const auto rep = rerank_sweep(data, std::vector<int>{1, 2}, metric, std::vector<std::string>{"bleu4"});
  const auto row = to_json(rep.rows[1]);
  EXPECT_EQ(row.at("k"), 2);
  EXPECT_NEAR(row.at("relative_kappa").get<double>(), 0.5, 1e-12);
  EXPECT_TRUE(row.at("baseline_means").contains("bleu4"));
  const auto choice = to_json(rep.chosen[0][1]);
  EXPECT_EQ(choice.at("chosen"), "other?");
  EXPECT_EQ(choice.at("ppl_best"), "same?");
}
