#include <benchmark/benchmark.h>

#include <random>

#include "folreward/le_metric.hpp"
#include "folreward/sgrpo.hpp"

using namespace folreward;

namespace {

const FolExpr& six_pred() {
  static const FolExpr f = canonicalize(
      parse("(Teacher(x) ∧ Teaches(x) → Teaching(x)) ∨ (Painter(x) ∧ ¬Painted(x) ↔ Painting(x))"));
  return f;
}

const FolExpr& six_ref() {
  static const FolExpr f = canonicalize(
      parse("(Teaching(x) ∧ Teacher(x) → Teaches(x)) ∨ (Painted(x) ∧ ¬Painting(x) ↔ Painter(x))"));
  return f;
}

void BM_BindOriginal(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(bind_original(six_pred(), six_ref()));
}
BENCHMARK(BM_BindOriginal);

void BM_BindOptimized(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(bind_optimized(six_pred(), six_ref()));
}
BENCHMARK(BM_BindOptimized);

void BM_LeScore(benchmark::State& state) {
  const auto mode = state.range(0) ? LeMode::Optimized : LeMode::Original;
  for (auto _ : state) {
    benchmark::DoNotOptimize(le_score("∀x (Human(x) ∧ Wise(x) → Mortal(x) ∨ Tall(x))",
                                      "∀x ((Human(x) ∧ Wise(x)) → (Mortal(x) ∨ Tall(x)))", mode));
  }
}
BENCHMARK(BM_LeScore)->Arg(0)->Arg(1);

void BM_Bracketing(benchmark::State& state) {
  const auto k = static_cast<std::size_t>(state.range(0));
  const auto chunk = static_cast<std::size_t>(state.range(1));
  std::string text = "A0";
  for (std::size_t i = 1; i <= k; ++i) text += (i % 2 ? " ∧ A" : " ∨ A") + std::to_string(i);
  const auto tokens = tokenize(text);
  BracketingOptions opts;
  if (chunk) opts.chunk_size = chunk; else opts.chunk_size = std::nullopt;
  for (auto _ : state) benchmark::DoNotOptimize(enumerate_bracketings(tokens, opts));
}
BENCHMARK(BM_Bracketing)->Args({6, 0})->Args({8, 0})->Args({8, 4})->Args({12, 4});

void BM_ObjectiveGradient(benchmark::State& state) {
  using namespace sgrpo;
  const auto cfg = default_train_config();
  const std::size_t positions = cfg.hp.max_length;
  std::mt19937_64 rng(1);
  PolicyParams old(cfg.prompts.size(), positions, cfg.vocab.size(), PolicyRole::Old);
  const auto cur = old.with_role(PolicyRole::Current);
  const auto ref = old.with_role(PolicyRole::Reference);
  auto group = sample_group(old, cfg.prompts[0], cfg.hp, rng);
  std::vector<double> rewards(group.outputs.size());
  for (std::size_t i = 0; i < rewards.size(); ++i) rewards[i] = (i % 3) / 2.0;
  group.set_rewards(rewards);
  group.normalize(cfg.hp.std_epsilon);
  for (auto _ : state) benchmark::DoNotOptimize(objective_gradient(cur, old, ref, cfg.prompts[0], group, cfg.hp));
}
BENCHMARK(BM_ObjectiveGradient);

}  // namespace
BENCHMARK_MAIN();
