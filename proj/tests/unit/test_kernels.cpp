#include <gtest/gtest.h>
#include <omp.h>

#include <random>
#include <vector>

#include "slotzero/tensor/kernels.hpp"

namespace {

using namespace sz;

std::vector<double> random_vector(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<double> v(n);
  for (auto& x : v) x = u(rng);
  return v;
}

void expect_close(const std::vector<double>& a, const std::vector<double>& b, double tol) {
  ASSERT_EQ(a.size(), b.size());
  for (std::size_t i = 0; i < a.size(); ++i) EXPECT_NEAR(a[i], b[i], tol) << "index " << i;
}

struct Dims {
  std::size_t m, k, n;
};

class KernelShapes : public ::testing::TestWithParam<Dims> {};

TEST_P(KernelShapes, GemmMatchesReference) {
  const auto [m, k, n] = GetParam();
  const auto a = random_vector(m * k, 1), b = random_vector(k * n, 2);
  for (bool acc : {false, true}) {
    auto c1 = random_vector(m * n, 3), c2 = c1;
    kernels::gemm(a, b, c1, m, k, n, acc);
    kernels::reference::gemm(a, b, c2, m, k, n, acc);
    expect_close(c1, c2, 1e-12);
  }
}

TEST_P(KernelShapes, TransposedProductsMatchReference) {
  const auto [m, k, n] = GetParam();
  const auto a = random_vector(m * k, 4), g = random_vector(m * n, 5), b = random_vector(k * n, 6);
  auto o1 = random_vector(k * n, 7), o2 = o1;
  kernels::gemm_tn_acc(a, g, o1, m, k, n);
  kernels::reference::gemm_tn_acc(a, g, o2, m, k, n);
  expect_close(o1, o2, 1e-12);
  auto p1 = random_vector(m * k, 8), p2 = p1;
  kernels::gemm_nt_acc(g, b, p1, m, k, n);
  kernels::reference::gemm_nt_acc(g, b, p2, m, k, n);
  expect_close(p1, p2, 1e-12);
}

INSTANTIATE_TEST_SUITE_P(Shapes, KernelShapes,
                         ::testing::Values(Dims{1, 1, 1}, Dims{3, 5, 2}, Dims{17, 9, 33},
                                           Dims{128, 64, 64}, Dims{200, 3, 1}));

TEST(Kernels, TanhMatchesReference) {
  const auto x = random_vector(5000, 9);
  std::vector<double> y1(x.size()), y2(x.size());
  kernels::tanh_map(x, y1);
  kernels::reference::tanh_map(x, y2);
  EXPECT_EQ(y1, y2);
}

TEST(Kernels, ResultsDoNotDependOnThreadCount) {
  const std::size_t m = 96, k = 40, n = 24;
  const auto a = random_vector(m * k, 10), b = random_vector(k * n, 11);
  const int saved = omp_get_max_threads();
  std::vector<double> base(m * n);
  omp_set_num_threads(1);
  kernels::gemm(a, b, base, m, k, n, false);
  for (int threads : {2, 3, 4}) {
    omp_set_num_threads(threads);
    std::vector<double> c(m * n);
    kernels::gemm(a, b, c, m, k, n, false);
    EXPECT_EQ(c, base) << threads << " threads";
  }
  omp_set_num_threads(saved);
}

TEST(Kernels, IdentityProduct) {
  const std::vector<double> eye{1, 0, 0, 1}, b{3, 4};
  std::vector<double> c(2);
  kernels::gemm(eye, b, c, 2, 2, 1, false);
  EXPECT_EQ(c, (std::vector<double>{3, 4}));
}

}  // namespace
