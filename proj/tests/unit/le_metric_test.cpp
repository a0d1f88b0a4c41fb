#include <gtest/gtest.h>

#include <random>

#include "folreward/le_metric.hpp"
#include "oracle.hpp"

using namespace folreward;

namespace {

FolExpr cp(const std::string& text) { return canonicalize(parse(text)); }

std::map<std::string, std::string> as_map(const BindingMap& b) {
  std::map<std::string, std::string> m;
  for (const auto& [p, r] : b.pairs) m[p.canonical_text] = r.canonical_text;
  return m;
}

BindingMap identity_of(const FolExpr& pred, const FolExpr& ref) {
  return BindingMap::identity(atoms_of(pred), atoms_of(ref));
}

}  // namespace

TEST(PropositionalScore, Examples) {
  const auto pq = cp("P(a) ∧ Q(a)");
  EXPECT_EQ(propositional_score(pq, pq, identity_of(pq, pq)), 1.0);
  const auto p = cp("P(a)");
  const auto np = cp("¬P(a)");
  EXPECT_EQ(propositional_score(p, np, identity_of(p, np)), 0.0);
  EXPECT_EQ(propositional_score(p, pq, identity_of(p, pq)), 0.75);
  EXPECT_EQ(oracle::agreement(p, pq, {{"P(a)", "P(a)"}}), 0.75);
}

TEST(PropositionalScore, MatchesTruthTableOracleOnRandomPairs) {
  oracle::FormulaGen gen(31);
  for (int i = 0; i < 200; ++i) {
    const auto pred = canonicalize(gen.formula(5, 4));
    const auto ref = canonicalize(gen.formula(5, 4));
    const auto b = identity_of(pred, ref);
    EXPECT_EQ(propositional_score(pred, ref, b), oracle::agreement(pred, ref, as_map(b)))
        << render(pred) << " vs " << render(ref);
  }
}

TEST(PropositionalScore, AtomCapAndBadBindings) {
  const auto wide = cp("A ∧ B ∧ C ∧ D");
  EXPECT_THROW(propositional_score(wide, wide, identity_of(wide, wide), 3), CapExceeded);
  BindingMap bogus;
  bogus.pairs.push_back({AtomicUnit{"Z", {}, "Z"}, AtomicUnit{"A", {}, "A"}});
  EXPECT_THROW(propositional_score(wide, wide, bogus), std::invalid_argument);
}

TEST(BindOriginal, Examples) {
  const auto f = cp("∀x (Mortal(x) → Person(x))");
  const auto same = bind_original(f, f);
  EXPECT_EQ(same.score, 1.0);
  EXPECT_EQ(as_map(same.binding), (std::map<std::string, std::string>{{"Mortal(v1)", "Mortal(v1)"},
                                                                      {"Person(v1)", "Person(v1)"}}));

  const auto renamed = bind_original(cp("Angry(x) → NonPhys(x)"), cp("Anger(x) → NonPhysical(x)"));
  EXPECT_EQ(renamed.score, 1.0);
  EXPECT_EQ(as_map(renamed.binding),
            (std::map<std::string, std::string>{{"Angry(x)", "Anger(x)"}, {"NonPhys(x)", "NonPhysical(x)"}}));
  EXPECT_EQ(renamed.bindings_explored, 2u);

  const auto cross = bind_original(cp("P(a)"), cp("Q(b)"));
  EXPECT_EQ(cross.score, 1.0);
  EXPECT_EQ(as_map(cross.binding), (std::map<std::string, std::string>{{"P(a)", "Q(b)"}}));
}

TEST(BindOriginal, UnequalAtomCountsLeaveExtrasUnbound) {
  const auto r = bind_original(cp("P(a) ∧ Q(a) ∧ R(a)"), cp("P(a) ∧ Q(a)"));
  EXPECT_EQ(r.binding.pairs.size(), 2u);
  EXPECT_EQ(r.binding.unbound_prediction.size(), 1u);
  EXPECT_TRUE(r.binding.injective());
  EXPECT_EQ(r.bindings_explored, 6u);
}

TEST(BindOriginal, FactorialCap) {
  const auto big = cp("A ∧ B ∧ C ∧ D ∧ E ∧ F ∧ G ∧ H");
  EXPECT_THROW(bind_original(big, big), CapExceeded);
  LeLimits limits;
  limits.max_factorial_atoms = 3;
  EXPECT_THROW(bind_original(cp("A ∧ B ∧ C ∧ D"), cp("A ∧ B"), limits), CapExceeded);
  try {
    bind_original(cp("A ∧ B ∧ C ∧ D"), cp("A"), limits);
    FAIL();
  } catch (const CapExceeded& e) {
    EXPECT_EQ(e.which(), CapExceeded::Which::FactorialAtoms);
    EXPECT_EQ(e.limit(), 3u);
    EXPECT_EQ(e.actual(), 4u);
  }
}

TEST(BindOriginal, MatchesBruteForceOracle) {
  oracle::FormulaGen gen(41);
  for (int i = 0; i < 100; ++i) {
    const auto pred = canonicalize(gen.formula(3, 4));
    const auto ref = canonicalize(gen.formula(3, 4));
    const auto got = bind_original(pred, ref);
    const auto best = oracle::best_matchings(pred, ref);
    ASSERT_FALSE(best.empty());
    EXPECT_EQ(got.score, best.front().score) << render(pred) << " vs " << render(ref);
    EXPECT_EQ(got.total_distance, best.front().distance);
    const auto m = as_map(got.binding);
    EXPECT_TRUE(std::any_of(best.begin(), best.end(), [&](const auto& c) { return c.binding == m; }));
  }
}

TEST(BindOptimized, Examples) {
  const auto f = cp("∀x (Mortal(x) → Person(x))");
  const auto same = bind_optimized(f, f);
  EXPECT_EQ(same.score, 1.0);
  EXPECT_EQ(same.binding.pairs.size(), 2u);

  const auto pred = cp("Alpha(a) ∧ Beta(b)");
  const auto ref = cp("Gamma(c) ∨ Delta(d)");
  const auto none = bind_optimized(pred, ref);
  EXPECT_TRUE(none.binding.pairs.empty());
  EXPECT_EQ(none.binding.unbound_prediction.size(), 2u);
  EXPECT_EQ(none.score, propositional_score(pred, ref, BindingMap{}));
  EXPECT_EQ(none.score, oracle::agreement(pred, ref, {}));
}

TEST(BindOptimized, OneToManyComponentMatchesExhaustiveSearch) {
  const auto pred = canonicalize(parse("Teacher(x) ∧ ¬Teaches(x) → Teaching(x)"));
  const auto ref = canonicalize(parse("Teaching(x) ∧ ¬Teacher(x) → Teaches(x)"));
  const auto graph = build_candidate_graph(atoms_of(pred), atoms_of(ref), {});
  ASSERT_EQ(graph.components.size(), 1u);
  EXPECT_TRUE(graph.components[0].one_to_many());
  for (const auto& e : graph.edges) EXPECT_GE(e.similarity, 0.6);

  const auto got = bind_optimized(pred, ref);
  EXPECT_EQ(got.bindings_explored, 6u);
  const auto best = oracle::best_matchings(pred, ref);
  EXPECT_EQ(got.score, best.front().score);
  EXPECT_EQ(got.score, 1.0);
}

TEST(BindOptimized, ComponentCapTruncates) {
  LeConfig cfg;
  cfg.limits.component_cap = 4;
  const auto f = cp("Teacher(x) ∧ Teaches(x) ∧ Teaching(x)");
  const auto r = bind_optimized(f, f, cfg);
  EXPECT_TRUE(r.truncated);
  EXPECT_LE(r.bindings_explored, 4u);
}

TEST(BindOptimized, PluggableSimilarityBackend) {
  LeConfig cfg;
  cfg.similarity_fn = [](std::string_view, std::string_view) { return 1.0; };
  const auto r = bind_optimized(cp("P(a)"), cp("Q(b)"), cfg);
  EXPECT_EQ(r.score, 1.0);
  EXPECT_EQ(r.binding.pairs.size(), 1u);
}

TEST(LeScore, Examples) {
  EXPECT_EQ(le_score("∀x (Mortal(x) → Person(x))", "∀x (Mortal(x) → Person(x))", LeMode::Original).score, 1.0);
  EXPECT_EQ(le_score("P(a) → Q(a)", "¬P(a) ∨ Q(a)", LeMode::Optimized).score, 1.0);
  const auto r = le_score("A(x) ∧ B(x) → C(x)", "(A(x) ∧ B(x)) → C(x)", LeMode::Optimized);
  EXPECT_EQ(r.score, 1.0);
  EXPECT_EQ(r.trees_explored, 2u);
}

TEST(LeScore, BracketingRecoversIntendedGrouping) {
  // Precedence reads the prediction as A ∧ (B → C); the other tree matches.
  const auto r = le_score("A(x) ∧ B(x) → C(x)", "A(x) ∧ (B(x) → C(x))", LeMode::Original);
  EXPECT_EQ(r.score, 1.0);
  EXPECT_EQ(r.trees_explored, 2u);
}

TEST(LeScore, ErrorsPropagate) {
  EXPECT_THROW(le_score("((", "P(a)", LeMode::Optimized), ParseError);
  EXPECT_THROW(le_score("P(a)", "P(a) ∧", LeMode::Optimized), ParseError);
  const std::string big = "A ∧ B ∧ C ∧ D ∧ E ∧ F ∧ G ∧ H";
  EXPECT_THROW(le_score(big, big, LeMode::Original), CapExceeded);
}

TEST(LeScore, OriginalFallsBackWhenConfigured) {
  LeConfig cfg;
  cfg.fallback_to_optimized = true;
  const std::string big = "(A ∧ B) ∧ (C ∧ D) ∧ (E ∧ F) ∧ (G ∧ H)";
  const auto r = le_score(big, big, LeMode::Original, cfg);
  EXPECT_TRUE(r.fell_back);
  EXPECT_EQ(r.mode, LeMode::Optimized);
  EXPECT_EQ(r.score, 1.0);
}

TEST(LeScore, ReflexiveAndBounded) {
  oracle::FormulaGen gen(53);
  for (int i = 0; i < 100; ++i) {
    const auto f = render(gen.formula(5, 5));
    const auto g = render(gen.formula(5, 5));
    for (auto mode : {LeMode::Original, LeMode::Optimized}) {
      EXPECT_EQ(le_score(f, f, mode).score, 1.0) << f;
      const double s = le_score(f, g, mode).score;
      EXPECT_GE(s, 0.0);
      EXPECT_LE(s, 1.0);
    }
  }
}

TEST(LeScore, NegationScoresZeroUnderSimilarityBinding) {
  for (const char* f : {"Human(x) → Mortal(x)", "∀x (Green(x) ∨ Tall(x))", "Rain ∧ ¬Wind", "P(a) ↔ Q(b)"}) {
    const auto neg = std::string("¬(") + f + ")";
    EXPECT_EQ(le_score(f, neg, LeMode::Optimized).score, 0.0) << f;
  }
  // The exhaustive search may swap atoms: Q → P agrees with ¬(P → Q) on half the rows.
  EXPECT_EQ(le_score("Human(x) → Mortal(x)", "¬(Human(x) → Mortal(x))", LeMode::Original).score, 0.5);
}

TEST(LeMode, Names) {
  EXPECT_EQ(parse_le_mode("original"), LeMode::Original);
  EXPECT_EQ(parse_le_mode("optimized"), LeMode::Optimized);
  EXPECT_STREQ(to_string(LeMode::Original), "original");
  EXPECT_THROW(parse_le_mode("fast"), std::invalid_argument);
}

TEST(LeScore, OptimizedCanExceedOriginalWhenAtomsAreUnrelated) {
  // Original must bind A to B; optimized leaves the unrelated pair unbound.
  EXPECT_EQ(le_score("A(x)", "¬B(x)", LeMode::Original).score, 0.0);
  EXPECT_EQ(le_score("A(x)", "¬B(x)", LeMode::Optimized).score, 0.5);
}
