#pragma once

#include <cstddef>
#include <random>
#include <span>
#include <vector>

#include "slotzero/tensor/tensor.hpp"

namespace sz::model {

/// Diagonal Gaussian policy in normalised action units; actions live in [-bound, bound]^d.
struct GaussianPolicy {
  std::vector<double> mean;
  std::vector<double> log_std;
  double bound = 1.0;
};

/// log N(action; mean, diag(exp(log_std))^2). Out-of-box actions are clamped first and
/// counted in clamped_density_queries().
double gaussian_log_density(const GaussianPolicy& policy, std::span<const double> action);

/// Draws mean + std * eps, then clamps each coordinate into the box.
std::vector<std::vector<double>> gaussian_sample(const GaussianPolicy& policy, std::size_t count,
                                                 std::mt19937_64& rng);

std::size_t clamped_density_queries();

/// Differentiable batch form: mean/log_std are [B, d], actions [B * M, d] (M per sample,
/// sample-major). Returns [B * M] log-densities.
Tensor gaussian_log_density(const Tensor& mean, const Tensor& log_std, const Tensor& actions,
                            std::size_t per_sample);

}  // namespace sz::model
