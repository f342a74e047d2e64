#include <benchmark/benchmark.h>

#include <random>

#include "docforge/evalkit.hpp"

namespace {

docforge::eval::Tokens random_tokens(std::size_t n, unsigned seed) {
  static const char* vocab[] = {"the", "widget", "renders", "a", "layout", "with", "theme", "error",
                                "returns", "null", "config", "path", "value", "list", "of", "items"};
  std::mt19937 rng(seed);
  std::uniform_int_distribution<std::size_t> pick(0, std::size(vocab) - 1);
  docforge::eval::Tokens out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) out.emplace_back(vocab[pick(rng)]);
  return out;
}

void BM_Bleu4(benchmark::State& state) {
  auto n = static_cast<std::size_t>(state.range(0));
  auto hyp = random_tokens(n, 1), ref = random_tokens(n, 2);
  for (auto _ : state) benchmark::DoNotOptimize(docforge::eval::bleu4(hyp, ref));
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_Bleu4)->RangeMultiplier(4)->Range(64, 16384)->Complexity(benchmark::oN);

void BM_RougeL(benchmark::State& state) {
  auto n = static_cast<std::size_t>(state.range(0));
  auto hyp = random_tokens(n, 3), ref = random_tokens(n, 4);
  for (auto _ : state) benchmark::DoNotOptimize(docforge::eval::rouge_l(hyp, ref));
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_RougeL)->RangeMultiplier(4)->Range(64, 4096)->Complexity(benchmark::oNSquared);

void BM_Tokenize(benchmark::State& state) {
  std::string text;
  for (const auto& t : random_tokens(static_cast<std::size_t>(state.range(0)), 5)) text += t + ", ";
  for (auto _ : state) benchmark::DoNotOptimize(docforge::eval::tokenize(text));
  state.SetBytesProcessed(static_cast<int64_t>(state.iterations() * text.size()));
}
BENCHMARK(BM_Tokenize)->Range(256, 65536);

}  // namespace

BENCHMARK_MAIN();
