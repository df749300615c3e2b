#include <gtest/gtest.h>

#include "rquge/baselines.hpp"
#include "rquge/error.hpp"
#include "support/generators.hpp"
#include "support/oracles.hpp"

using namespace rquge;
using namespace rquge::baselines;

TEST(Bleu, IdentityAndDisjoint) {
  EXPECT_DOUBLE_EQ(bleu4("who won the race in 1998 ?", "who won the race in 1998 ?"), 1.0);
  EXPECT_LT(bleu4("alpha beta gamma delta", "one two three four"), 1e-6);
}

TEST(Bleu, CatOnTheMatMatchesOracle) {
  const double v = bleu4("the cat sat on the mat", "the cat is on the mat");
  EXPECT_NEAR(v, oracle::bleu4("the cat sat on the mat", "the cat is on the mat", kBleuEpsilon), 1e-12);
  // 5/6, 3/5, 1/4 and a zero 4-gram count smoothed to 1e-9 of 3.
  EXPECT_NEAR(v, std::pow(5.0 / 6 * 3.0 / 5 * 1.0 / 4 * 1e-9 / 3, 0.25), 1e-12);
}

TEST(Bleu, MatchesOracleOnRandomPairs) {
  gen::Engine e(2024);
  for (int i = 0; i < 200; ++i) {
    const auto c = gen::sentence(e, 1, 10), r = gen::sentence(e, 1, 10);
    EXPECT_NEAR(bleu4(c, r), oracle::bleu4(c, r, kBleuEpsilon), 1e-12) << c << " | " << r;
  }
}

TEST(Bleu, SelfScoreIsOneForFourTokens) {
  gen::Engine e(3);
  for (int i = 0; i < 100; ++i) {
    const auto s = gen::sentence(e, 4, 12);
    EXPECT_NEAR(bleu4(s, s), 1.0, 1e-12) << s;
  }
}

TEST(Bleu, EmptyInputs) {
  EXPECT_DOUBLE_EQ(bleu4("", "a reference"), 0.0);
  EXPECT_THROW(bleu4("a candidate", "  "), ReferenceRequiredError);
}

TEST(Rouge, LcsExample) {
  EXPECT_DOUBLE_EQ(rouge("a b c d", "a c b d", RougeVariant::rougeL), 0.75);
  EXPECT_EQ(lcs_length({"a", "b", "c", "d"}, {"a", "c", "b", "d"}), 3u);
  EXPECT_DOUBLE_EQ(rouge("x y", "x y", RougeVariant::rouge1), 1.0);
  EXPECT_DOUBLE_EQ(rouge("x y", "z w", RougeVariant::rouge1), 0.0);
  EXPECT_DOUBLE_EQ(rouge("x y", "z w", RougeVariant::rougeL), 0.0);
  EXPECT_THROW(rouge("x", "", RougeVariant::rouge1), ReferenceRequiredError);
}

TEST(Rouge, RougeLMatchesOracle) {
  gen::Engine e(77);
  for (int i = 0; i < 200; ++i) {
    const auto c = gen::sentence(e, 1, 10), r = gen::sentence(e, 1, 10);
    EXPECT_NEAR(rouge(c, r, RougeVariant::rougeL), oracle::rouge_l(c, r), 1e-12) << c << " | " << r;
  }
}

TEST(Rouge, Rouge1IsSymmetricAndBounded) {
  gen::Engine e(78);
  for (int i = 0; i < 200; ++i) {
    const auto c = gen::sentence(e, 1, 10), r = gen::sentence(e, 1, 10);
    const double ab = rouge(c, r, RougeVariant::rouge1);
    EXPECT_NEAR(ab, rouge(r, c, RougeVariant::rouge1), 1e-12);
    EXPECT_GE(ab, 0.0);
    EXPECT_LE(ab, 1.0);
  }
}

TEST(QaScore, Examples) {
  auto s = qa_f1_em("France", "France");
  EXPECT_DOUBLE_EQ(s.f1, 1.0);
  EXPECT_EQ(s.em, 1);
  s = qa_f1_em("the cat", "cat");
  EXPECT_DOUBLE_EQ(s.f1, 1.0);
  EXPECT_EQ(s.em, 1);
  s = qa_f1_em("dog", "cat");
  EXPECT_DOUBLE_EQ(s.f1, 0.0);
  EXPECT_EQ(s.em, 0);
}

TEST(QaScore, ExactMatchImpliesFullF1) {
  gen::Engine e(9);
  for (int i = 0; i < 300; ++i) {
    const auto a = gen::sentence(e, 0, 4), b = gen::index(e, 3) == 0 ? a : gen::sentence(e, 0, 4);
    const auto s = qa_f1_em(a, b);
    if (s.em == 1) {
      EXPECT_DOUBLE_EQ(s.f1, 1.0);
    }
    EXPECT_NEAR(s.f1, oracle::token_f1(a, b), 1e-12);
  }
}

TEST(External, AdaptersPassValuesThrough) {
  AdapterRegistry reg;
  reg.add("half", {[](const ExternalInput&) { return 0.5; }, true});
  reg.add("len", {[](const ExternalInput& in) { return static_cast<double>(in.candidate.size()) / 100; }, false});
  auto v = external_metric(reg, "half", {"q", std::nullopt, std::nullopt, std::nullopt});
  EXPECT_EQ(v.metric_name, "half");
  EXPECT_DOUBLE_EQ(v.value, 0.5);
  v = external_metric(reg, "len", {"abcde", std::nullopt, std::nullopt, std::nullopt});
  EXPECT_DOUBLE_EQ(v.value, 0.05);
  EXPECT_FALSE(v.higher_is_better);
  EXPECT_THROW(external_metric(reg, "bleurt", {"q", {}, {}, {}}), ConfigError);
  EXPECT_EQ(reg.names(), (std::vector<std::string>{"half", "len"}));
}

TEST(Named, ReferenceMetricsByName) {
  EXPECT_TRUE(is_reference_metric("bleu4"));
  EXPECT_TRUE(is_reference_metric("rougeL"));
  EXPECT_FALSE(is_reference_metric("rquge"));
  QGInstance inst;
  inst.id = "x";
  inst.context = "c";
  inst.gold_answer = {"c", 0};
  inst.reference_question = "a b c d";
  EXPECT_DOUBLE_EQ(reference_metric("rougeL", "a c b d", inst).value, 0.75);
  EXPECT_THROW(reference_metric("meteor", "a", inst), ConfigError);
  inst.reference_question.reset();
  EXPECT_THROW(reference_metric("bleu4", "a", inst), ReferenceRequiredError);
}
