#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "slotzero/model/params.hpp"
#include "slotzero/trainer/config.hpp"
#include "slotzero/trainer/targets.hpp"

namespace sz::verify {

struct TensorReport {
  std::string name;
  double max_rel_error = 0.0;
  std::size_t worst_index = 0;
  double analytic = 0.0;
  double numeric = 0.0;
};

struct GradReport {
  std::vector<TensorReport> tensors;
  double tolerance = 0.0;
  double max_rel_error = 0.0;
  std::string worst;
  std::vector<std::string> failing;  // tensors whose error exceeds the tolerance

  bool passed() const { return failing.empty(); }
};

/// |a - n| / max(|a|, |n|, 1e-6)
double relative_error(double analytic, double numeric);

using LossFn = std::function<Tensor()>;

/// Central differences (step h) over every entry of `params` against the reverse-mode gradient
/// of `loss`. `after_backward` runs between the backward pass and the comparison; test fixtures
/// use it to corrupt an adjoint.
GradReport grad_sweep(std::span<const model::NamedTensor> params, const LossFn& loss,
                      double tolerance, double h = 1e-5,
                      const std::function<void()>& after_backward = {});

/// Small random world model with a synthetic replay buffer and unrolled targets; the readout
/// layers are randomised too so every gradient path is live.
struct LossFixture {
  model::ModelParams params;
  trainer::TrainTargets targets;
  trainer::TrainerConfig config;
};

struct FixtureSpec {
  bool continuous = false;
  int slots = 2;
  int slot_dim = 4;
  int hidden = 8;
  int unroll = 2;
  int candidates = 3;
  trainer::ConsistencyLoss consistency = trainer::ConsistencyLoss::mse;
};

LossFixture make_loss_fixture(const FixtureSpec& spec, std::uint64_t seed);

/// Gradient sweep of the full weighted training loss on a fixture.
GradReport sweep_training_loss(const FixtureSpec& spec, std::uint64_t seed, double tolerance);

}  // namespace sz::verify
