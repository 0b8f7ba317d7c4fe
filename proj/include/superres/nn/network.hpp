#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "superres/nn/architecture.hpp"
#include "superres/nn/kernels.hpp"
#include "superres/signal.hpp"

namespace superres::nn {

/// Weights and bias of one layer; both empty for Flatten.
struct LayerParams {
  std::vector<double> weights;
  std::vector<double> bias;

  bool operator==(const LayerParams&) const = default;
};

/// Per-example input standardization applied in front of the first layer.
struct Preprocessing {
  bool standardize_input = true;
  /// Map the output back through the input's mean/std.
  bool rescale_output = false;

  bool operator==(const Preprocessing&) const = default;
};

/// Full parameter set of the extrapolator G: R^M -> R^(N-M).
struct PredictorParams {
  ArchitectureSpec arch;
  std::vector<LayerParams> layers;
  Preprocessing preprocessing;
  std::uint64_t init_seed = 0;
  std::uint64_t shuffle_seed = 0;
  /// Number of sinusoids in the training data; 0 when unknown.
  std::size_t components = 0;

  std::size_t input_len() const noexcept { return arch.input_len; }
  std::size_t output_len() const noexcept { return arch.output_len; }

  /// Scaled-normal fan-in init for ReLU layers, small uniform for linear
  /// layers, zero biases.
  static PredictorParams initialize(const ArchitectureSpec& arch, std::uint64_t seed);
  static PredictorParams zeros(const ArchitectureSpec& arch);

  /// Array shapes match the architecture and every value is finite.
  void validate() const;

  /// Shapes of the weight array for every layer, e.g. {32, 1, 5}.
  std::vector<std::vector<std::size_t>> weight_shapes() const;

  bool operator==(const PredictorParams& o) const {
    return arch == o.arch && layers == o.layers && preprocessing == o.preprocessing &&
           init_seed == o.init_seed && shuffle_seed == o.shuffle_seed && components == o.components;
  }
};

using Gradients = std::vector<LayerParams>;

Gradients zero_gradients(const PredictorParams& params);

struct TrainingPair {
  std::span<const double> input;
  std::span<const double> target;
};

struct LossAndGradients {
  double loss = 0.0;
  Gradients grads;
};

/// Owns activation buffers so repeated batch evaluations do not reallocate.
class BatchEvaluator {
 public:
  explicit BatchEvaluator(kernels::Backend backend = kernels::Backend::Parallel) : backend_(backend) {}

  /// Outputs for a batch of inputs, row-major [batch][output_len].
  std::vector<double> forward(const PredictorParams& params, std::span<const std::span<const double>> inputs);

  /// Summed squared error over the batch; gradients accumulate into `grads`
  /// (which must be zero-initialized by the caller for a fresh evaluation).
  double loss_and_gradients(const PredictorParams& params, std::span<const TrainingPair> batch, Gradients& grads);

 private:
  void run_forward(const PredictorParams& params, std::size_t batch);

  kernels::Backend backend_;
  std::vector<std::vector<double>> acts_;
  std::vector<double> means_;
  std::vector<double> scales_;
  std::vector<double> grad_a_;
  std::vector<double> grad_b_;
};

std::vector<double> forward(const PredictorParams& params, std::span<const double> x_a,
                            kernels::Backend backend = kernels::Backend::Parallel);

LossAndGradients loss_and_gradients(const PredictorParams& params, std::span<const TrainingPair> batch,
                                    kernels::Backend backend = kernels::Backend::Parallel);

/// G(x_a) as a Predicted window continuing x_a's indices.
SampleWindow predict_window(const PredictorParams& params, const SampleWindow& x_a);

}  // namespace superres::nn
