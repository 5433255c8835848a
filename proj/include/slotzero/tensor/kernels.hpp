#pragma once

#include <cstddef>
#include <span>

// Dense row-major kernels behind the tensor ops. The default versions split output
// rows across OpenMP threads; every output element is still summed in a fixed order,
// so results do not depend on the thread count. `reference` holds the plain serial
// loops used by the tests and the benchmark as ground truth.
namespace sz::kernels {

// c[m,n] (+)= a[m,k] * b[k,n]
void gemm(std::span<const double> a, std::span<const double> b, std::span<double> c,
          std::size_t m, std::size_t k, std::size_t n, bool accumulate);

// out[k,n] += a[m,k]^T * g[m,n]
void gemm_tn_acc(std::span<const double> a, std::span<const double> g, std::span<double> out,
                 std::size_t m, std::size_t k, std::size_t n);

// out[m,k] += g[m,n] * b[k,n]^T
void gemm_nt_acc(std::span<const double> g, std::span<const double> b, std::span<double> out,
                 std::size_t m, std::size_t k, std::size_t n);

// y[i] = tanh(x[i])
void tanh_map(std::span<const double> x, std::span<double> y);

namespace reference {

void gemm(std::span<const double> a, std::span<const double> b, std::span<double> c,
          std::size_t m, std::size_t k, std::size_t n, bool accumulate);
void gemm_tn_acc(std::span<const double> a, std::span<const double> g, std::span<double> out,
                 std::size_t m, std::size_t k, std::size_t n);
void gemm_nt_acc(std::span<const double> g, std::span<const double> b, std::span<double> out,
                 std::size_t m, std::size_t k, std::size_t n);
void tanh_map(std::span<const double> x, std::span<double> y);

}  // namespace reference

}  // namespace sz::kernels
