#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "slotzero/tensor/tensor.hpp"

// Differentiable primitives. Broadcasting is limited to scalar-vs-tensor and equal
// shapes; row-wise bias lives in linear(). Shape violations throw ShapeError, domain
// violations (log of a non-positive value, NaN into softmax) throw DomainError.
namespace sz::ops {

enum class Elementwise { add, sub, mul, relu, tanh, exp, log, scale };
enum class Reduce { sum, mean, max };

/// [.., k] x [k, n] -> [.., n]. The left operand may be rank 2 or 3; leading axes are
/// treated as rows.
Tensor matmul(const Tensor& a, const Tensor& b);

/// x[.., in] * w[in, out] + b[out]
Tensor linear(const Tensor& x, const Tensor& w, const Tensor& b);

/// Dispatches on `kind`; binary kinds need `b`, `scale` reads `factor`.
Tensor elementwise(Elementwise kind, const Tensor& a, const Tensor* b = nullptr,
                   double factor = 1.0);

Tensor add(const Tensor& a, const Tensor& b);
Tensor sub(const Tensor& a, const Tensor& b);
Tensor mul(const Tensor& a, const Tensor& b);
Tensor scale(const Tensor& a, double factor);
Tensor add_scalar(const Tensor& a, double value);
Tensor relu(const Tensor& a);
Tensor tanh(const Tensor& a);
Tensor exp(const Tensor& a);
Tensor log(const Tensor& a);
Tensor square(const Tensor& a);
/// Clamps into [lo, hi]; the adjoint is zero where the clamp is active.
Tensor clamp(const Tensor& a, double lo, double hi);

/// Reduces one axis away. Max routes its adjoint to the first maximal entry.
Tensor reduce(Reduce kind, const Tensor& a, std::size_t axis);
Tensor sum(const Tensor& a, std::size_t axis);
Tensor mean(const Tensor& a, std::size_t axis);
Tensor max(const Tensor& a, std::size_t axis);
Tensor sum_all(const Tensor& a);
Tensor mean_all(const Tensor& a);

Tensor softmax(const Tensor& a, std::size_t axis);
Tensor log_softmax(const Tensor& a, std::size_t axis);

Tensor reshape(const Tensor& a, Shape shape);
/// Keeps [start, start + count) along `axis`.
Tensor slice(const Tensor& a, std::size_t axis, std::size_t start, std::size_t count);
Tensor concat(std::span<const Tensor> parts, std::size_t axis);
Tensor concat(std::initializer_list<Tensor> parts, std::size_t axis);

/// out[r] = a[index[r]] for a rank-2 `a`.
Tensor gather_rows(const Tensor& a, std::span<const std::size_t> index);
/// out[index[r]] += a[r]; out has `rows` rows. Rows never referenced stay zero.
Tensor scatter_add_rows(const Tensor& a, std::span<const std::size_t> index, std::size_t rows);

}  // namespace sz::ops
