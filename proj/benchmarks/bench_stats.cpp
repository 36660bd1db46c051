#include <benchmark/benchmark.h>

#include <random>

#include "lurbench/stats.hpp"

namespace {

std::vector<double> normal_sample(int n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> d(0.0, 1.0);
  std::vector<double> v(static_cast<size_t>(n));
  for (auto& x : v) x = d(rng);
  return v;
}

void BM_WilcoxonExact(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const auto a = normal_sample(n, 1);
  const auto b = normal_sample(n, 2);
  for (auto _ : state) {
    benchmark::DoNotOptimize(lur::wilcoxon_signed_rank(a, b));
  }
}
BENCHMARK(BM_WilcoxonExact)->Arg(12)->Arg(25)->Arg(40);

void BM_Normality(benchmark::State& state) {
  const auto v = normal_sample(static_cast<int>(state.range(0)), 3);
  for (auto _ : state) {
    benchmark::DoNotOptimize(lur::dagostino_pearson(v));
  }
}
BENCHMARK(BM_Normality)->Arg(40)->Arg(1000);

}  // namespace
