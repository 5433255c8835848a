#include "slotzero/model/gaussian.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <numbers>

#include "slotzero/tensor/ops.hpp"

namespace sz::model {

namespace {
std::atomic<std::size_t> clamped_queries{0};
const double kHalfLogTwoPi = 0.5 * std::log(2.0 * std::numbers::pi);
}  // namespace

std::size_t clamped_density_queries() { return clamped_queries.load(); }

double gaussian_log_density(const GaussianPolicy& policy, std::span<const double> action) {
  if (action.size() != policy.mean.size() || policy.log_std.size() != policy.mean.size()) {
    throw ShapeError("gaussian_log_density: dimension mismatch");
  }
  double total = 0.0;
  bool clamped = false;
  for (std::size_t i = 0; i < action.size(); ++i) {
    const double a = std::clamp(action[i], -policy.bound, policy.bound);
    clamped = clamped || a != action[i];
    const double z = (a - policy.mean[i]) * std::exp(-policy.log_std[i]);
    total += -0.5 * z * z - policy.log_std[i] - kHalfLogTwoPi;
  }
  if (clamped) clamped_queries.fetch_add(1);
  return total;
}

std::vector<std::vector<double>> gaussian_sample(const GaussianPolicy& policy, std::size_t count,
                                                 std::mt19937_64& rng) {
  std::vector<std::vector<double>> out(count, std::vector<double>(policy.mean.size()));
  for (auto& a : out) {
    for (std::size_t i = 0; i < a.size(); ++i) {
      std::normal_distribution<double> eps(0.0, 1.0);
      const double x = policy.mean[i] + std::exp(policy.log_std[i]) * eps(rng);
      a[i] = std::clamp(x, -policy.bound, policy.bound);
    }
  }
  return out;
}

Tensor gaussian_log_density(const Tensor& mean, const Tensor& log_std, const Tensor& actions,
                            std::size_t per_sample) {
  const std::size_t batch = mean.dim(0);
  const std::size_t dim = mean.dim(1);
  if (actions.rank() != 2 || actions.dim(0) != batch * per_sample || actions.dim(1) != dim) {
    throw ShapeError("gaussian_log_density: actions " + shape_string(actions.shape()));
  }
  std::vector<std::size_t> owner(batch * per_sample);
  for (std::size_t r = 0; r < owner.size(); ++r) owner[r] = r / per_sample;
  const Tensor mu = ops::gather_rows(mean, owner);
  const Tensor ls = ops::gather_rows(log_std, owner);
  const Tensor z = ops::mul(ops::sub(actions, mu), ops::exp(ops::scale(ls, -1.0)));
  const Tensor per_dim = ops::add(ops::scale(ops::square(z), -0.5), ops::scale(ls, -1.0));
  return ops::add_scalar(ops::sum(per_dim, 1), -static_cast<double>(dim) * kHalfLogTwoPi);
}

}  // namespace sz::model
