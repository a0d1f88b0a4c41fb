#include <gtest/gtest.h>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <random>

#include "folreward/corpus.hpp"
#include "oracle.hpp"

using namespace folreward;

namespace {

std::filesystem::path write_temp(const std::string& name, const std::string& content) {
  const auto path = std::filesystem::temp_directory_path() / ("folreward_corpus_" + name);
  std::ofstream(path, std::ios::binary) << content;
  return path;
}

std::vector<std::string> split_ws(const std::string& s) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : s) {
    if (c == ' ') {
      if (!cur.empty()) out.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  if (!cur.empty()) out.push_back(cur);
  return out;
}

}  // namespace

TEST(LoadPairs, WellFormedJsonl) {
  const auto path = write_temp("ok.jsonl",
                               "{\"id\": \"a\", \"prediction\": \"P(x)\", \"reference\": \"P(x)\"}\n"
                               "{\"prediction\": \"Q(x)\", \"reference\": \"Q(x)\"}\n"
                               "\n"
                               "{\"id\": \"c\", \"prediction\": \"R(x)\", \"reference\": \"¬R(x)\"}\n");
  const auto r = load_pairs(path, PairFormat::Jsonl);
  ASSERT_EQ(r.pairs.size(), 3u);
  EXPECT_TRUE(r.malformed.empty());
  EXPECT_EQ(r.pairs[0].id, "a");
  EXPECT_EQ(r.pairs[1].id, "1");
  EXPECT_EQ(r.pairs[2].reference, "¬R(x)");
}

TEST(LoadPairs, EmptyFile) {
  const auto path = write_temp("empty.jsonl", "");
  const auto r = load_pairs(path, PairFormat::Jsonl);
  EXPECT_TRUE(r.pairs.empty());
  EXPECT_TRUE(r.malformed.empty());
}

TEST(LoadPairs, MalformedRowIsSkippedAndCounted) {
  const auto path = write_temp("mixed.jsonl",
                               "{\"prediction\": \"A\", \"reference\": \"A\"}\n"
                               "{\"prediction\": \"B\", \"reference\": \"B\"}\n"
                               "{\"prediction\": \"C\"\n"
                               "{\"prediction\": \"D\", \"reference\": \"D\"}\n"
                               "{\"prediction\": \"E\", \"reference\": \"E\"}\n");
  const auto r = load_pairs(path, PairFormat::Jsonl);
  EXPECT_EQ(r.pairs.size(), 4u);
  ASSERT_EQ(r.malformed.size(), 1u);
  EXPECT_EQ(r.malformed[0].line, 3u);
}

TEST(LoadPairs, TsvWithAndWithoutIds) {
  const auto r = parse_pairs("P(x)\tP(x)\nk2\tQ(x)\t¬Q(x)\nonly-one-column\n", PairFormat::Tsv);
  ASSERT_EQ(r.pairs.size(), 2u);
  EXPECT_EQ(r.pairs[0].id, "0");
  EXPECT_EQ(r.pairs[1].id, "k2");
  EXPECT_EQ(r.pairs[1].prediction, "Q(x)");
  EXPECT_EQ(r.malformed.size(), 1u);
}

TEST(LoadPairs, DuplicateIdsAreMalformed) {
  const auto r = parse_pairs("a\tP\tP\na\tQ\tQ\n", PairFormat::Tsv);
  EXPECT_EQ(r.pairs.size(), 1u);
  EXPECT_EQ(r.malformed.size(), 1u);
}

TEST(LoadPairs, MissingFileThrows) {
  EXPECT_THROW(load_pairs("/nonexistent/pairs.jsonl", PairFormat::Jsonl), std::runtime_error);
  EXPECT_THROW(parse_pair_format("csv"), std::invalid_argument);
}

TEST(BleuTokenize, PadsConnectivesAndPunctuation) {
  EXPECT_EQ(bleu_tokenize("∀x (P(x)∧Q(x, y))"),
            (std::vector<std::string>{"∀", "x", "(", "P", "(", "x", ")", "∧", "Q", "(", "x", ",", "y", ")", ")"}));
  EXPECT_EQ(bleu_tokenize("A<->B->C"), (std::vector<std::string>{"A", "<->", "B", "->", "C"}));
}

TEST(CorpusBleu, Examples) {
  const std::vector<EvalPair> same = {{"0", "∀x (P(x) → Q(x))", "∀x (P(x) → Q(x))"},
                                      {"1", "R(a) ∧ S(b) ∨ T(c)", "R(a) ∧ S(b) ∨ T(c)"}};
  EXPECT_DOUBLE_EQ(corpus_bleu(same), 100.0);
  EXPECT_EQ(corpus_bleu({{"0", "", "P ( x )"}, {"1", "", "Q ( x )"}}), 0.0);

  const std::string hyp = "P ( x ) ∧ Q ( x )";
  const std::string ref = "P ( x ) ∨ Q ( x )";
  const double want = oracle::bleu({{split_ws(hyp), split_ws(ref)}});
  EXPECT_NEAR(corpus_bleu({{"0", hyp, ref}}), want, 1e-9);
  // Precisions 8/9, 6/8, 4/7, 2/6 with no brevity penalty.
  EXPECT_NEAR(want, 100.0 * std::pow(8.0 / 9 * 6.0 / 8 * 4.0 / 7 * 2.0 / 6, 0.25), 1e-9);
}

TEST(CorpusBleu, BrevityPenaltySmoothingAndErrors) {
  const std::vector<EvalPair> shortish = {{"0", "a b c d e", "a b c d e f g h"}};
  EXPECT_NEAR(corpus_bleu(shortish), 100.0 * std::exp(1.0 - 8.0 / 5.0), 1e-9);
  const std::vector<EvalPair> no_bigrams = {{"0", "a c d e", "a b d f"}};
  EXPECT_EQ(corpus_bleu(no_bigrams), 0.0);
  BleuConfig smooth;
  smooth.smoothing_floor = 0.1;
  EXPECT_GT(corpus_bleu(no_bigrams, smooth), 0.0);
  EXPECT_THROW(corpus_bleu({}), std::invalid_argument);
}

TEST(CorpusBleu, PermutationInvariantAndBounded) {
  std::vector<EvalPair> pairs = {{"0", "P(x) ∧ Q(x) → R(x)", "P(x) ∧ Q(x) → S(x)"},
                                 {"1", "∀x (A(x) ∨ B(x))", "∀x (A(x) ∨ ¬B(x))"},
                                 {"2", "C(a) ↔ D(b)", "C(a) ↔ D(b) ∧ E(c)"}};
  const double base = corpus_bleu(pairs);
  EXPECT_GE(base, 0.0);
  EXPECT_LE(base, 100.0);
  std::mt19937 rng(1);
  for (int i = 0; i < 5; ++i) {
    std::shuffle(pairs.begin(), pairs.end(), rng);
    EXPECT_NEAR(corpus_bleu(pairs), base, 1e-9);
  }
}

TEST(CorpusLe, IdenticalPairsScoreOne) {
  const std::vector<EvalPair> pairs = {{"0", "∀x (P(x) → Q(x))", "∀x (P(x) → Q(x))"}, {"1", "A ∧ B", "A ∧ B"}};
  const auto r = corpus_le(pairs, LeMode::Optimized);
  EXPECT_EQ(r.mean_le, 1.0);
  EXPECT_EQ(r.per_pair.size(), 2u);
  EXPECT_TRUE(r.failures.empty());
}

TEST(CorpusLe, UnparseablePredictionContributesZero) {
  const std::vector<EvalPair> pairs = {{"0", "A ∧ B", "A ∧ B"}, {"1", "((", "A"}, {"2", "C", "C"}};
  const auto r = corpus_le(pairs, LeMode::Optimized);
  EXPECT_DOUBLE_EQ(r.mean_le, 2.0 / 3.0);
  ASSERT_EQ(r.failures.size(), 1u);
  EXPECT_EQ(r.failures[0].id, "1");
  EXPECT_EQ(r.per_pair.size() + r.failures.size(), pairs.size());
}

TEST(CorpusLe, MixedFixtureMatchesPerPairOracle) {
  const std::vector<EvalPair> pairs = {{"same", "P(a) ∧ Q(a)", "P(a) ∧ Q(a)"},
                                       {"weaker", "P(a)", "P(a) ∧ Q(a)"},
                                       {"negated", "Human(x) → Mortal(x)", "¬(Human(x) → Mortal(x))"}};
  std::vector<double> oracle_scores;
  for (const auto& p : pairs) {
    const auto pred = canonicalize(parse(p.prediction));
    const auto ref = canonicalize(parse(p.reference));
    std::map<std::string, std::string> id;
    for (const auto& a : oracle::atoms(pred)) {
      const auto ra = oracle::atoms(ref);
      if (std::find(ra.begin(), ra.end(), a) != ra.end()) id[a] = a;
    }
    oracle_scores.push_back(oracle::agreement(pred, ref, id));
  }
  EXPECT_EQ(oracle_scores, (std::vector<double>{1.0, 0.75, 0.0}));
  const auto r = corpus_le(pairs, LeMode::Optimized);
  EXPECT_DOUBLE_EQ(r.mean_le, (1.0 + 0.75 + 0.0) / 3.0);
  for (std::size_t i = 0; i < pairs.size(); ++i) EXPECT_EQ(r.per_pair[i].report.score, oracle_scores[i]);
}

TEST(CorpusLe, PermutationInvariantParallelAndEmptyRejected) {
  std::vector<EvalPair> pairs;
  oracle::FormulaGen gen(77);
  for (int i = 0; i < 30; ++i) {
    pairs.push_back({std::to_string(i), render(gen.formula(4, 4)), render(gen.formula(4, 4))});
  }
  const auto base = corpus_le(pairs, LeMode::Optimized);
  CorpusOptions par;
  par.threads = 4;
  EXPECT_NEAR(corpus_le(pairs, LeMode::Optimized, par).mean_le, base.mean_le, 1e-12);
  std::mt19937 rng(2);
  std::shuffle(pairs.begin(), pairs.end(), rng);
  EXPECT_NEAR(corpus_le(pairs, LeMode::Optimized).mean_le, base.mean_le, 1e-12);
  EXPECT_GE(base.mean_le, 0.0);
  EXPECT_LE(base.mean_le, 1.0);
  EXPECT_THROW(corpus_le({}, LeMode::Optimized), std::invalid_argument);
}

TEST(CorpusLe, RemovingAPairAtTheMeanKeepsTheMean) {
  const std::vector<EvalPair> pairs = {{"0", "A", "A"}, {"1", "P(a)", "P(a) ∧ Q(a)"}, {"2", "A", "¬A"}};
  const auto all = corpus_le(pairs, LeMode::Optimized);
  // Scores 1, 0.75, 0: add a pair scoring exactly the mean and remove it again.
  std::vector<EvalPair> more = pairs;
  more.push_back({"3", "P(a)", "P(a) ∧ Q(a)"});
  const auto with = corpus_le(more, LeMode::Optimized);
  EXPECT_NEAR(with.mean_le, (1.0 + 0.75 + 0.0 + 0.75) / 4.0, 1e-12);
  std::vector<EvalPair> at_mean = {{"0", "A", "A"}, {"1", "A", "¬A"}, {"2", "P", "Q"}};
  const auto m = corpus_le(at_mean, LeMode::Optimized);
  EXPECT_NEAR(m.per_pair[2].report.score, 0.5, 1e-12);
  at_mean.pop_back();
  EXPECT_NEAR(corpus_le(at_mean, LeMode::Optimized).mean_le, m.mean_le, 1e-12);
  EXPECT_NEAR(all.mean_le, 1.75 / 3.0, 1e-12);
}
