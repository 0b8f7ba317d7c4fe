#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "superres/datagen.hpp"
#include "superres/nn/network.hpp"

namespace superres::nn {

struct TrainConfig {
  std::size_t epochs = 50;
  std::size_t batch_size = 50;
  double learning_rate = 0.001;
  double adam_beta1 = 0.9;
  double adam_beta2 = 0.999;
  double adam_eps = 1e-8;
  std::uint64_t init_seed = 0;
  std::uint64_t shuffle_seed = 0;
  Preprocessing preprocessing;
  kernels::Backend backend = kernels::Backend::Parallel;

  void validate() const;
};

/// Adam over the flattened parameter arrays. The step uses the batch-mean
/// gradient, grads / batch, so the learning rate is independent of batch size.
class Adam {
 public:
  Adam(const PredictorParams& params, double lr, double beta1, double beta2, double eps);

  void step(PredictorParams& params, const Gradients& grads, double grad_scale);

  std::size_t steps() const noexcept { return t_; }

 private:
  double lr_, beta1_, beta2_, eps_;
  std::size_t t_ = 0;
  Gradients m_;
  Gradients v_;
};

struct TrainResult {
  PredictorParams params;
  /// Mean per-example squared error over each completed epoch.
  std::vector<double> history;
  /// True when training stopped on a non-finite loss; params then hold the
  /// last epoch that finished cleanly.
  bool diverged = false;
  std::string message;
};

using EpochCallback = std::function<void(std::size_t epoch, double mean_loss)>;

TrainResult train(std::span<const TrainingPair> examples, const ArchitectureSpec& arch, const TrainConfig& cfg,
                  const EpochCallback& on_epoch = {});

TrainResult train(const datagen::Dataset& dataset, const ArchitectureSpec& arch, const TrainConfig& cfg,
                  const EpochCallback& on_epoch = {});

std::vector<TrainingPair> training_pairs(const datagen::Dataset& dataset);

}  // namespace superres::nn
