#pragma once

#include <cstddef>
#include <span>

// Batched layer kernels. Tensors are dense row-major:
//   conv activations  [batch][channels][length]
//   conv weights      [filters][in_channels][kernel]
//   dense activations [batch][features]
//   dense weights     [units][in_features]
// Backward kernels accumulate into dw/db and overwrite din; din may be empty
// when the input gradient is not needed.
//
// Two interchangeable backends: `reference` is the plain serial loop nest
// kept as the test oracle, `parallel` is the OpenMP version used in
// training. Each output element of `parallel` is owned by exactly one thread
// with a fixed summation order, so results do not depend on thread count.

namespace superres::nn::kernels {

struct ConvDims {
  std::size_t batch, in_channels, filters, length, kernel;
};

struct DenseDims {
  std::size_t batch, in_features, units;
};

#define SUPERRES_KERNEL_DECLS                                                                                  \
  void conv1d_forward(const ConvDims& d, std::span<const double> in, std::span<const double> w,                \
                      std::span<const double> b, std::span<double> out);                                      \
  void conv1d_backward(const ConvDims& d, std::span<const double> in, std::span<const double> w,               \
                       std::span<const double> dout, std::span<double> dw, std::span<double> db,              \
                       std::span<double> din);                                                                \
  void dense_forward(const DenseDims& d, std::span<const double> in, std::span<const double> w,                \
                     std::span<const double> b, std::span<double> out);                                       \
  void dense_backward(const DenseDims& d, std::span<const double> in, std::span<const double> w,               \
                      std::span<const double> dout, std::span<double> dw, std::span<double> db,               \
                      std::span<double> din);                                                                 \
  void relu_forward(std::span<double> x);                                                                     \
  void relu_backward(std::span<const double> activated, std::span<double> grad);

namespace reference {
SUPERRES_KERNEL_DECLS
}

namespace parallel {
SUPERRES_KERNEL_DECLS
}

#undef SUPERRES_KERNEL_DECLS

enum class Backend { Reference, Parallel };

/// Left zero-padding for "same" convolution; the right side gets kernel-1-left.
constexpr std::size_t same_pad_left(std::size_t kernel) { return (kernel - 1) / 2; }

}  // namespace superres::nn::kernels
