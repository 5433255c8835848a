// OpenMP kernels against the serial reference loops. Sizes follow the shapes the model
// actually produces: edge batches of B*K*(K-1) rows through 64-wide layers.
#include <benchmark/benchmark.h>

#include <random>
#include <vector>

#include "slotzero/tensor/kernels.hpp"

namespace {

std::vector<double> random_values(std::size_t n, unsigned seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<double> v(n);
  for (auto& x : v) x = u(rng);
  return v;
}

template <bool Reference>
void BM_Gemm(benchmark::State& state) {
  const auto m = static_cast<std::size_t>(state.range(0));
  const std::size_t k = 64, n = 64;
  const auto a = random_values(m * k, 1);
  const auto b = random_values(k * n, 2);
  std::vector<double> c(m * n);
  for (auto _ : state) {
    if constexpr (Reference) {
      sz::kernels::reference::gemm(a, b, c, m, k, n, false);
    } else {
      sz::kernels::gemm(a, b, c, m, k, n, false);
    }
    benchmark::DoNotOptimize(c.data());
  }
  state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations() * m * k * n));
}

template <bool Reference>
void BM_GemmTn(benchmark::State& state) {
  const auto m = static_cast<std::size_t>(state.range(0));
  const std::size_t k = 64, n = 64;
  const auto a = random_values(m * k, 3);
  const auto g = random_values(m * n, 4);
  std::vector<double> out(k * n);
  for (auto _ : state) {
    if constexpr (Reference) {
      sz::kernels::reference::gemm_tn_acc(a, g, out, m, k, n);
    } else {
      sz::kernels::gemm_tn_acc(a, g, out, m, k, n);
    }
    benchmark::DoNotOptimize(out.data());
  }
  state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations() * m * k * n));
}

template <bool Reference>
void BM_Tanh(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto x = random_values(n, 5);
  std::vector<double> y(n);
  for (auto _ : state) {
    if constexpr (Reference) {
      sz::kernels::reference::tanh_map(x, y);
    } else {
      sz::kernels::tanh_map(x, y);
    }
    benchmark::DoNotOptimize(y.data());
  }
  state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations() * n));
}

}  // namespace

BENCHMARK(BM_Gemm<false>)->Name("gemm/openmp")->RangeMultiplier(4)->Range(6, 6144);
BENCHMARK(BM_Gemm<true>)->Name("gemm/reference")->RangeMultiplier(4)->Range(6, 6144);
BENCHMARK(BM_GemmTn<false>)->Name("gemm_tn/openmp")->RangeMultiplier(4)->Range(6, 6144);
BENCHMARK(BM_GemmTn<true>)->Name("gemm_tn/reference")->RangeMultiplier(4)->Range(6, 6144);
BENCHMARK(BM_Tanh<false>)->Name("tanh/openmp")->RangeMultiplier(8)->Range(64, 1 << 18);
BENCHMARK(BM_Tanh<true>)->Name("tanh/reference")->RangeMultiplier(8)->Range(64, 1 << 18);

BENCHMARK_MAIN();
