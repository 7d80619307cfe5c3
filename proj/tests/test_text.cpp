#include <algorithm>
#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "mpsent/io/text_io.hpp"
#include "mpsent/text.hpp"

using namespace mpsent;
using namespace mpsent::text;

namespace {

Date day(int y, unsigned m, unsigned d) {
  return Date{std::chrono::year{y}, std::chrono::month{m}, std::chrono::day{d}};
}

Lexicon toy_lexicon() {
  return parse_lexicon(R"(# toy
[positive]
strong
improved
robust
[negative]
weak
[uncertainty]
uncertain
downside risk
risk
)");
}

std::string words(int n, const std::string& filler = "the") {
  std::string s;
  for (int i = 0; i < n; ++i) s += filler + " ";
  return s;
}

// Pairwise-disagreement form: D_o averages within-unit disagreement over
// pairable values, D_e over all pairs of pairable values.
double alpha_brute_force(const LabelMatrix& m) {
  std::vector<std::vector<std::string>> units;
  std::vector<std::string> pooled;
  for (const auto& u : m) {
    std::vector<std::string> v;
    for (const auto& l : u)
      if (l) v.push_back(*l);
    if (v.size() >= 2) {
      units.push_back(v);
      pooled.insert(pooled.end(), v.begin(), v.end());
    }
  }
  const double n = static_cast<double>(pooled.size());
  double d_o = 0.0;
  for (const auto& v : units) {
    double dis = 0.0;
    for (std::size_t i = 0; i < v.size(); ++i)
      for (std::size_t j = 0; j < v.size(); ++j)
        if (i != j && v[i] != v[j]) dis += 1.0;
    d_o += dis / static_cast<double>(v.size() - 1);
  }
  d_o /= n;
  double d_e = 0.0;
  for (std::size_t i = 0; i < pooled.size(); ++i)
    for (std::size_t j = 0; j < pooled.size(); ++j)
      if (i != j && pooled[i] != pooled[j]) d_e += 1.0;
  d_e /= n * (n - 1.0);
  return 1.0 - d_o / d_e;
}

LabelMatrix matrix(std::initializer_list<std::initializer_list<const char*>> rows) {
  LabelMatrix m;
  for (const auto& r : rows) {
    std::vector<std::optional<std::string>> u;
    for (const char* c : r) u.push_back(c ? std::optional<std::string>(c) : std::nullopt);
    m.push_back(u);
  }
  return m;
}

}  // namespace

TEST(Tokenize, LowercasesAndSplitsOnNonAlphanumeric) {
  EXPECT_EQ(tokenize("Rates ROSE, again; 2.5%-points!"), (Tokens{"rates", "rose", "again", "2", "5", "points"}));
  EXPECT_TRUE(tokenize(" ,.; ").empty());
  EXPECT_EQ(tokenize("économie forte"), (Tokens{"économie", "forte"}));
}

TEST(Tone, ThreePositiveOneNegativeInTwentyWords) {
  const std::string text = "Strong growth, improved jobs and robust demand offset weak exports " + words(10);
  ASSERT_EQ(tokenize(text).size(), 20u);
  const std::vector<Document> docs = {{"a", day(2020, 1, 5), text}};
  EXPECT_DOUBLE_EQ(tone_index(docs, toy_lexicon()), 0.1);
}

TEST(Tone, NoHitsIsZeroAndEmptyPeriodFails) {
  const std::vector<Document> docs = {{"a", day(2020, 1, 5), words(15, "neutral")}};
  EXPECT_EQ(tone_index(docs, toy_lexicon()), 0.0);
  const std::vector<Document> blank = {{"a", day(2020, 1, 5), " ... "}};
  try {
    tone_index(blank, toy_lexicon());
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::EmptyPeriod);
  }
}

TEST(Tone, PooledAndInvariantToDuplication) {
  const Lexicon lex = toy_lexicon();
  const std::vector<Document> docs = {{"a", day(2020, 1, 5), "strong strong weak"},
                                      {"b", day(2020, 2, 5), words(7) + "robust"}};
  // pooled: (3 - 1) / 11, not the average of per-document ratios
  EXPECT_DOUBLE_EQ(tone_index(docs, lex), 2.0 / 11.0);
  std::vector<Document> twice = docs;
  twice.insert(twice.end(), docs.begin(), docs.end());
  EXPECT_DOUBLE_EQ(tone_index(twice, lex), tone_index(docs, lex));
}

TEST(Tone, BoundedOnRandomText) {
  const Lexicon lex = toy_lexicon();
  const std::vector<std::string> vocab = {"strong", "weak", "the", "robust", "risk", "improved", "rates"};
  std::mt19937 rng(5);
  for (int r = 0; r < 50; ++r) {
    std::string t;
    for (int i = 0; i < 1 + r; ++i) t += vocab[rng() % vocab.size()] + " ";
    const double v = tone_index({{"x", day(2020, 1, 1), t}}, lex);
    EXPECT_GE(v, -1.0);
    EXPECT_LE(v, 1.0);
  }
}

TEST(Lexicon, MultiwordGreedyWithoutOverlap) {
  const Lexicon lex = toy_lexicon();
  EXPECT_EQ(lex.uncertainty.count(tokenize("downside risk")), 1u);
  EXPECT_EQ(lex.uncertainty.count(tokenize("risk risk downside")), 2u);
  EXPECT_EQ(lex.uncertainty.count(tokenize("Downside-risk, uncertain")), 2u);
  TermSet overlapping({"a b", "b c"});
  EXPECT_EQ(overlapping.count(tokenize("a b c")), 1u);
  EXPECT_EQ(overlapping.count(tokenize("a b b c")), 2u);
}

TEST(Lexicon, ParseErrors) {
  auto code_of = [](const char* s) {
    try {
      parse_lexicon(s);
    } catch (const Error& e) {
      return e.code();
    }
    return ErrorCode::Usage;
  };
  EXPECT_EQ(code_of("[positive]\ngood\n[negative]\nGood\n"), ErrorCode::InvalidArgument);
  EXPECT_EQ(code_of("good\n"), ErrorCode::ParseError);
  EXPECT_EQ(code_of("[neutral]\nfine\n"), ErrorCode::ParseError);
  EXPECT_EQ(code_of("[positive]\n---\n"), ErrorCode::InvalidArgument);
}

TEST(LabelTone, FormulaAndAntisymmetry) {
  std::vector<SentenceLabel> l;
  for (int i = 0; i < 5; ++i) l.push_back(SentenceLabel::Positive);
  for (int i = 0; i < 2; ++i) l.push_back(SentenceLabel::Negative);
  for (int i = 0; i < 3; ++i) l.push_back(SentenceLabel::Neutral);
  EXPECT_DOUBLE_EQ(label_tone_index(l), 0.3);
  std::vector<SentenceLabel> swapped;
  for (auto x : l)
    swapped.push_back(x == SentenceLabel::Positive   ? SentenceLabel::Negative
                      : x == SentenceLabel::Negative ? SentenceLabel::Positive
                                                     : x);
  EXPECT_DOUBLE_EQ(label_tone_index(swapped), -0.3);
  EXPECT_EQ(label_tone_index(std::vector<SentenceLabel>(4, SentenceLabel::Neutral)), 0.0);
  EXPECT_THROW(label_tone_index({}), Error);
}

TEST(Uncertainty, RawCount) {
  const std::string text = "Uncertain times and downside risk " + words(95);
  ASSERT_EQ(tokenize(text).size(), 100u);
  EXPECT_DOUBLE_EQ(uncertainty_raw(count_terms(text, toy_lexicon())), 2.0);
}

TEST(Uncertainty, BaseWindowNormalization) {
  const std::vector<Date> q = {day(1994, 10, 1), day(1995, 1, 1), day(1995, 4, 1), day(1995, 7, 1)};
  const auto flat = normalize_to_base(q, {3.0, 3.0, 3.0, 3.0}, day(1995, 1, 1), day(1995, 12, 31));
  for (double v : flat) EXPECT_DOUBLE_EQ(v, 100.0);
  const std::vector<double> raw = {1.0, 2.0, 4.0, 3.0};
  const auto a = normalize_to_base(q, raw, day(1995, 1, 1), day(1995, 12, 31));
  EXPECT_NEAR((a[1] + a[2] + a[3]) / 3.0, 100.0, 1e-12);
  std::vector<double> doubled;
  for (double r : raw) doubled.push_back(2.0 * r);
  const auto b = normalize_to_base(q, doubled, day(1995, 1, 1), day(1995, 12, 31));
  for (std::size_t i = 0; i < a.size(); ++i) EXPECT_NEAR(a[i], b[i], 1e-12);
  try {
    normalize_to_base(q, raw, day(2001, 1, 1), day(2002, 1, 1));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::EmptyBaseWindow);
  }
}

TEST(Uncertainty, QuarterlySeriesFromCorpus) {
  const std::vector<Document> docs = {{"1", day(1995, 2, 3), "risk " + words(9)},
                                      {"2", day(1995, 3, 30), words(10)},
                                      {"3", day(1995, 5, 1), "uncertain risk " + words(8)}};
  const auto s = uncertainty_index(docs, toy_lexicon(), day(1995, 1, 1), day(1995, 12, 31));
  ASSERT_EQ(s.size(), 2u);
  EXPECT_EQ(s[0].period, day(1995, 1, 1));
  EXPECT_DOUBLE_EQ(s[0].raw, 5.0);
  EXPECT_DOUBLE_EQ(s[1].raw, 20.0);
  EXPECT_NEAR(s[0].index + s[1].index, 200.0, 1e-12);
}

TEST(Alpha, IdenticalCodersGiveOne) {
  const auto m = matrix({{"pos", "pos", "pos"}, {"neg", "neg", "neg"}, {"neu", "neu", nullptr}, {"pos", "pos", "pos"}});
  EXPECT_DOUBLE_EQ(krippendorff_alpha(m), 1.0);
}

TEST(Alpha, FourUnitExampleMatchesBruteForce) {
  const auto m = matrix({{"pos", "pos"}, {"neg", "pos"}, {"neu", "neu"}, {"neg", "neg"}});
  // coincidences: o(pos,pos)=2, o(neu,neu)=2, o(neg,neg)=2, o(pos,neg)=o(neg,pos)=1;
  // n = 8, n_pos = n_neg = 3, n_neu = 2, so alpha = 1 - 7 * 2 / (64 - 9 - 9 - 4) = 2/3
  EXPECT_NEAR(krippendorff_alpha(m), alpha_brute_force(m), 1e-12);
  EXPECT_NEAR(krippendorff_alpha(m), 2.0 / 3.0, 1e-12);
}

TEST(Alpha, PublishedReferenceExampleWithMissing) {
  // twelve units, four coders, nominal values 1..5, missing cells
  const char* N = nullptr;
  const auto m = matrix({{"1", "1", N, "1"}, {"2", "2", "3", "2"}, {"3", "3", "3", "3"}, {"3", "3", "3", "3"},
                         {"2", "2", "2", "2"}, {"1", "2", "3", "4"}, {"4", "4", "4", "4"}, {"1", "1", "2", "1"},
                         {"2", "2", "2", "2"}, {N, "5", "5", "5"}, {N, N, "1", "1"}, {N, "3", N, N}});
  EXPECT_NEAR(krippendorff_alpha(m), 0.743, 5e-4);
  EXPECT_NEAR(krippendorff_alpha(m), alpha_brute_force(m), 1e-12);
}

TEST(Alpha, PermutationInvariant) {
  auto m = matrix({{"a", "b", "a"}, {"b", "b", nullptr}, {"c", "a", "c"}, {"a", "a", "a"}, {"c", "c", "b"}});
  const double base = krippendorff_alpha(m);
  std::reverse(m.begin(), m.end());
  EXPECT_NEAR(krippendorff_alpha(m), base, 1e-14);
  for (auto& u : m) std::rotate(u.begin(), u.begin() + 1, u.end());
  EXPECT_NEAR(krippendorff_alpha(m), base, 1e-14);
  EXPECT_LE(base, 1.0);
}

TEST(Alpha, IndependentCodersNearZero) {
  std::mt19937 rng(11);
  LabelMatrix m;
  const char* vals[] = {"pos", "neg", "neu"};
  for (int i = 0; i < 4000; ++i) m.push_back({std::string(vals[rng() % 3]), std::string(vals[rng() % 3])});
  EXPECT_NEAR(krippendorff_alpha(m), 0.0, 0.05);
}

TEST(Alpha, DegenerateAndInvalid) {
  try {
    krippendorff_alpha(matrix({{"x", "x"}, {"x", "x"}}));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::DegenerateData);
  }
  EXPECT_THROW(krippendorff_alpha(matrix({{"x"}, {"y"}})), Error);
  EXPECT_THROW(krippendorff_alpha(matrix({{"x", nullptr}, {nullptr, "y"}})), Error);
}

TEST(TextIo, CorpusAndLabels) {
  const auto docs = io::parse_corpus("id,date,text\n1,2020-01-15,\"Strong, robust growth\"\n2,2020-Q2,weak\n");
  ASSERT_EQ(docs.size(), 2u);
  EXPECT_EQ(docs[0].text, "Strong, robust growth");
  EXPECT_EQ(docs[1].date, day(2020, 4, 1));
  EXPECT_THROW(io::parse_corpus("id,date,text\n1,notadate,x\n"), Error);

  const auto m = io::parse_labels("unit,coder,label\nu1,a,pos\nu1,b,pos\nu2,a,neg\nu2,b,\nu3,b,neu\n");
  ASSERT_EQ(m.size(), 3u);
  ASSERT_EQ(m[0].size(), 2u);
  EXPECT_EQ(*m[0][1], "pos");
  EXPECT_FALSE(m[1][1].has_value());
  EXPECT_FALSE(m[2][0].has_value());
  EXPECT_THROW(io::parse_labels("unit,coder,label\nu1,a,pos\nu1,a,neg\n"), Error);

  const auto s = io::parse_sentence_labels("date,label\n2020-01-01,positive\n2020-01-02,Neutral\n");
  ASSERT_EQ(s.size(), 2u);
  EXPECT_EQ(s[1].second, SentenceLabel::Neutral);
}
