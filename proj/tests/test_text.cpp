#include <gtest/gtest.h>

#include "rquge/text.hpp"
#include "support/generators.hpp"
#include "support/oracles.hpp"

using namespace rquge;

TEST(Text, NormalizeAnswerDropsArticlesAndPunctuation) {
  EXPECT_EQ(text::normalize_answer("The  Eiffel Tower!"), "eiffel tower");
  EXPECT_EQ(text::normalize_answer("an apple, a pear"), "apple pear");
  EXPECT_EQ(text::normalize_answer("   "), "");
}

TEST(Text, TokenF1PanelsExample) {
  // "per pair of panels" vs "pair of panels": 3 shared, P = 3/4, R = 1.
  EXPECT_NEAR(text::token_f1("per pair of panels", "pair of panels"), 6.0 / 7.0, 1e-12);
}

TEST(Text, TokenF1EdgeCases) {
  EXPECT_DOUBLE_EQ(text::token_f1("", ""), 1.0);
  EXPECT_DOUBLE_EQ(text::token_f1("x", ""), 0.0);
  EXPECT_DOUBLE_EQ(text::token_f1("", "x"), 0.0);
  EXPECT_DOUBLE_EQ(text::token_f1("the cat", "a cat"), 1.0);
  EXPECT_DOUBLE_EQ(text::token_f1("dog", "cat"), 0.0);
}

TEST(Text, TokenF1MatchesOracleOnRandomPairs) {
  gen::Engine e(17);
  for (int i = 0; i < 300; ++i) {
    const auto a = gen::sentence(e, 0, 8);
    const auto b = gen::sentence(e, 0, 8);
    EXPECT_NEAR(text::token_f1(a, b), oracle::token_f1(a, b), 1e-12) << a << " | " << b;
  }
}

TEST(Text, NgramTokensSplitPunctuation) {
  EXPECT_EQ(text::ngram_tokens("Who won, in 1998?"),
            (std::vector<std::string>{"who", "won", ",", "in", "1998", "?"}));
}

TEST(Text, NgramTokensMatchOracle) {
  gen::Engine e(5);
  for (int i = 0; i < 200; ++i) {
    const auto s = gen::sentence(e, 0, 10);
    EXPECT_EQ(text::ngram_tokens(s), oracle::tokens(s));
  }
}

TEST(Text, WordTokensKeepInnerApostrophesAndHyphens) {
  const auto toks = text::word_tokens("Isn't the well-known rock-n-roll band 'big'?");
  std::vector<std::string> words;
  for (const auto& t : toks) words.push_back(t.text);
  EXPECT_EQ(words, (std::vector<std::string>{"Isn't", "the", "well-known", "rock-n-roll", "band", "'", "big",
                                             "'", "?"}));
  for (const auto& t : toks) {
    EXPECT_EQ(std::string("Isn't the well-known rock-n-roll band 'big'?").substr(t.begin, t.end - t.begin), t.text);
  }
}

TEST(Text, Utf8OffsetsCountCodePoints) {
  const std::string s = "Zürich und Genève";
  EXPECT_EQ(text::utf8_length(s), 17u);
  const auto b = text::utf8_byte_offset(s, 11);
  ASSERT_TRUE(b.has_value());
  EXPECT_EQ(s.substr(*b, 7), "Genève");
  EXPECT_EQ(text::utf8_char_index(s, *b), 11u);
  EXPECT_EQ(text::utf8_byte_offset(s, 17), s.size());
  EXPECT_FALSE(text::utf8_byte_offset(s, 18).has_value());
}

TEST(Text, CollapseAndSplit) {
  EXPECT_EQ(text::collapse_whitespace("  a \t b\n c  "), "a b c");
  EXPECT_EQ(text::split_whitespace(" a  b "), (std::vector<std::string>{"a", "b"}));
  EXPECT_EQ(text::join({"a", "b", "c"}, "-"), "a-b-c");
  EXPECT_EQ(text::trim("\n x \t"), "x");
}
