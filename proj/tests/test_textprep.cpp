#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>

#include "factshap/error.hpp"
#include "factshap/textprep.hpp"

using namespace factshap;

namespace {

bool contains(const TokenStream& tokens, const std::string& t) {
  return std::find(tokens.begin(), tokens.end(), t) != tokens.end();
}

std::vector<TokenStream> toy_corpus() { return {{"a", "b"}, {"a"}, {"a", "c"}}; }

}  // namespace

TEST(Tokenize, EmptyText) { EXPECT_TRUE(tokenize("").empty()); }

TEST(Tokenize, DropsStopWordsKeepsContent) {
  const auto t = tokenize("Chinese influencer caused the new coronavirus outbreak after eating bat soup.");
  EXPECT_TRUE(contains(t, "bat"));
  EXPECT_TRUE(contains(t, "soup"));
  EXPECT_TRUE(contains(t, "coronavirus"));
  EXPECT_FALSE(contains(t, "the"));
  EXPECT_FALSE(contains(t, "after"));
}

TEST(Tokenize, SplitsOnHyphen) { EXPECT_EQ(tokenize("COVID-19"), (TokenStream{"covid", "19"})); }

TEST(Tokenize, NonAsciiIsSeparator) {
  // "café" in decomposed form: the combining accent composes under NFC and
  // the resulting é is a separator.
  EXPECT_EQ(tokenize("cafe\xCC\x81 latte"), tokenize("caf\xC3\xA9 latte"));
  EXPECT_EQ(tokenize("caf\xC3\xA9 latte"), (TokenStream{"caf", "latte"}));
}

TEST(Tokenize, ShortTokensDroppedDigitsKept) {
  EXPECT_EQ(tokenize("x 5 ok"), (TokenStream{"5", "ok"}));
}

TEST(Tokenize, StopWordsCanBeKept) {
  TokenizerConfig cfg;
  cfg.remove_stop_words = false;
  EXPECT_TRUE(contains(tokenize("the virus", cfg), "the"));
}

TEST(Stem, Plurals) {
  EXPECT_EQ(stem_token("viruses"), "virus");
  EXPECT_EQ(stem_token("cities"), "city");
  EXPECT_EQ(stem_token("masks"), "mask");
  EXPECT_EQ(stem_token("glass"), "glass");
  EXPECT_EQ(stem_token("virus"), "virus");
  EXPECT_EQ(stem_token("boxes"), "box");
  EXPECT_EQ(stem_token("gas"), "gas");
}

TEST(StopWords, SortedAndQueried) {
  const auto& words = stop_words();
  EXPECT_TRUE(std::is_sorted(words.begin(), words.end()));
  EXPECT_TRUE(is_stop_word("the"));
  EXPECT_FALSE(is_stop_word("vaccine"));
}

TEST(Vectorizer, IdfOfToyCorpus) {
  const auto v = Vectorizer::fit(toy_corpus());
  ASSERT_EQ(v.terms(), (std::vector<std::string>{"a", "b", "c"}));
  // Oracle: ln((1 + N) / (1 + df)) + 1 evaluated by hand.
  const double n = 3.0;
  EXPECT_DOUBLE_EQ(v.idf()[0], std::log((1 + n) / (1 + 3)) + 1);
  EXPECT_NEAR(v.idf()[0], 1.0, 1e-15);
  EXPECT_NEAR(v.idf()[1], std::log(4.0 / 2.0) + 1, 1e-15);
  EXPECT_NEAR(v.idf()[1], 1.6931, 1e-4);
  EXPECT_NEAR(v.idf()[2], 1.6931, 1e-4);
}

TEST(Vectorizer, TransformCountsTimesIdf) {
  VectorizerConfig raw;
  raw.l2_normalize = false;
  const auto v = Vectorizer::fit(toy_corpus(), raw);
  const auto x = v.transform({"a", "b", "b"});
  const double idf_b = std::log(2.0) + 1;
  EXPECT_NEAR(x.at(0), 1.0, 1e-12);
  EXPECT_NEAR(x.at(1), 2 * idf_b, 1e-12);
  EXPECT_NEAR(x.at(1), 3.3863, 1e-4);
  EXPECT_EQ(x.at(2), 0.0);

  const auto normalized = Vectorizer::fit(toy_corpus()).transform({"a", "b", "b"});
  const double norm = std::sqrt(1.0 + 4 * idf_b * idf_b);
  EXPECT_NEAR(normalized.at(0), 1.0 / norm, 1e-12);
  EXPECT_NEAR(normalized.norm(), 1.0, 1e-9);
}

TEST(Vectorizer, OutOfVocabularyIsZeroVector) {
  const auto v = Vectorizer::fit(toy_corpus());
  const auto x = v.transform({"zzz"});
  EXPECT_TRUE(x.empty());
  EXPECT_EQ(x.dimension(), 3u);
}

TEST(Vectorizer, EmptyVocabularyRejected) {
  EXPECT_THROW(Vectorizer::fit({{}, {}}), ValidationError);
}

TEST(Vectorizer, VocabularyIndependentOfOrderAndMonotone) {
  auto corpus = toy_corpus();
  const auto v1 = Vectorizer::fit(corpus);
  std::reverse(corpus.begin(), corpus.end());
  EXPECT_EQ(Vectorizer::fit(corpus).terms(), v1.terms());
  corpus.push_back({"d", "a"});
  const auto v2 = Vectorizer::fit(corpus);
  for (const auto& t : v1.terms()) EXPECT_GE(v2.column_of(t), 0) << t;
}

TEST(Vectorizer, MinDocumentFrequency) {
  VectorizerConfig cfg;
  cfg.min_document_frequency = 2;
  EXPECT_EQ(Vectorizer::fit(toy_corpus(), cfg).terms(), (std::vector<std::string>{"a"}));
}

TEST(Vectorizer, TransformIsPure) {
  const auto v = Vectorizer::fit({tokenize("masks reduce spread"), tokenize("garlic cures covid")});
  EXPECT_EQ(v.transform_text("Garlic masks"), v.transform_text("Garlic masks"));
}

TEST(Vectorizer, JsonRoundTrip) {
  const auto v = Vectorizer::fit({tokenize("masks reduce spread"), tokenize("garlic cures covid masks")});
  const auto back = Vectorizer::from_json(v.to_json());
  EXPECT_EQ(back, v);
  EXPECT_EQ(back.transform_text("masks garlic"), v.transform_text("masks garlic"));
}
