#include <benchmark/benchmark.h>

#include <random>

#include "lurbench/model.hpp"
#include "lurbench/nn/layers.hpp"

namespace {

lur::nn::Tensor random_input(int n, int c, int hw, std::uint64_t seed) {
  lur::nn::Tensor x({n, c, hw, hw});
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<float> u(0.0f, 1.0f);
  for (auto& v : x.data) v = u(rng);
  return x;
}

void BM_ConvForward(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const int hw = static_cast<int>(state.range(1));
  lur::nn::Conv2d<float> conv(16, 16, 3, 1, 1, 1);
  std::mt19937_64 rng(1);
  conv.init(rng);
  lur::nn::Tensor x = random_input(n, 16, hw, 2);
  for (auto _ : state) {
    benchmark::DoNotOptimize(conv.forward(x, true));
  }
  state.SetItemsProcessed(state.iterations() * n);
}
BENCHMARK(BM_ConvForward)->Args({64, 64})->Args({64, 32})->Args({16, 224});

void BM_FullModelStep(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const int px = static_cast<int>(state.range(1));
  const auto spec = lur::build_conv_regressor(3, px);
  auto net = lur::make_network<float>(spec);
  net.init(7);
  lur::nn::Tensor x = random_input(n, 3, px, 3);
  for (auto _ : state) {
    lur::nn::Tensor y = net.forward(x, true);
    lur::nn::Tensor gy(y.shape);
    std::fill(gy.data.begin(), gy.data.end(), 1.0f / n);
    net.zero_grad();
    benchmark::DoNotOptimize(net.backward(gy));
  }
  state.SetItemsProcessed(state.iterations() * n);
}
BENCHMARK(BM_FullModelStep)->Args({64, 64})->Unit(benchmark::kMillisecond);

}  // namespace
