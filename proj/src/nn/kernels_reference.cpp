#include <cstddef>

#include "superres/nn/kernels.hpp"

namespace superres::nn::kernels::reference {

void conv1d_forward(const ConvDims& d, std::span<const double> in, std::span<const double> w,
                    std::span<const double> b, std::span<double> out) {
  const auto pad = static_cast<std::ptrdiff_t>(same_pad_left(d.kernel));
  const auto len = static_cast<std::ptrdiff_t>(d.length);
  for (std::size_t n = 0; n < d.batch; ++n) {
    for (std::size_t f = 0; f < d.filters; ++f) {
      for (std::ptrdiff_t t = 0; t < len; ++t) {
        double acc = b[f];
        for (std::size_t c = 0; c < d.in_channels; ++c) {
          for (std::size_t k = 0; k < d.kernel; ++k) {
            const std::ptrdiff_t s = t + static_cast<std::ptrdiff_t>(k) - pad;
            if (s < 0 || s >= len) continue;
            acc += w[(f * d.in_channels + c) * d.kernel + k] *
                   in[(n * d.in_channels + c) * d.length + static_cast<std::size_t>(s)];
          }
        }
        out[(n * d.filters + f) * d.length + static_cast<std::size_t>(t)] = acc;
      }
    }
  }
}

void conv1d_backward(const ConvDims& d, std::span<const double> in, std::span<const double> w,
                     std::span<const double> dout, std::span<double> dw, std::span<double> db,
                     std::span<double> din) {
  const auto pad = static_cast<std::ptrdiff_t>(same_pad_left(d.kernel));
  const auto len = static_cast<std::ptrdiff_t>(d.length);
  for (double& v : din) v = 0.0;
  for (std::size_t n = 0; n < d.batch; ++n) {
    for (std::size_t f = 0; f < d.filters; ++f) {
      for (std::ptrdiff_t t = 0; t < len; ++t) {
        const double g = dout[(n * d.filters + f) * d.length + static_cast<std::size_t>(t)];
        db[f] += g;
        for (std::size_t c = 0; c < d.in_channels; ++c) {
          for (std::size_t k = 0; k < d.kernel; ++k) {
            const std::ptrdiff_t s = t + static_cast<std::ptrdiff_t>(k) - pad;
            if (s < 0 || s >= len) continue;
            const std::size_t wi = (f * d.in_channels + c) * d.kernel + k;
            const std::size_t xi = (n * d.in_channels + c) * d.length + static_cast<std::size_t>(s);
            dw[wi] += g * in[xi];
            if (!din.empty()) din[xi] += g * w[wi];
          }
        }
      }
    }
  }
}

void dense_forward(const DenseDims& d, std::span<const double> in, std::span<const double> w,
                   std::span<const double> b, std::span<double> out) {
  for (std::size_t n = 0; n < d.batch; ++n) {
    for (std::size_t u = 0; u < d.units; ++u) {
      double acc = b[u];
      for (std::size_t i = 0; i < d.in_features; ++i) acc += w[u * d.in_features + i] * in[n * d.in_features + i];
      out[n * d.units + u] = acc;
    }
  }
}

void dense_backward(const DenseDims& d, std::span<const double> in, std::span<const double> w,
                    std::span<const double> dout, std::span<double> dw, std::span<double> db,
                    std::span<double> din) {
  for (double& v : din) v = 0.0;
  for (std::size_t n = 0; n < d.batch; ++n) {
    for (std::size_t u = 0; u < d.units; ++u) {
      const double g = dout[n * d.units + u];
      db[u] += g;
      for (std::size_t i = 0; i < d.in_features; ++i) {
        dw[u * d.in_features + i] += g * in[n * d.in_features + i];
        if (!din.empty()) din[n * d.in_features + i] += g * w[u * d.in_features + i];
      }
    }
  }
}

void relu_forward(std::span<double> x) {
  for (double& v : x) v = v > 0.0 ? v : 0.0;
}

void relu_backward(std::span<const double> activated, std::span<double> grad) {
  for (std::size_t i = 0; i < grad.size(); ++i)
    if (activated[i] <= 0.0) grad[i] = 0.0;
}

}  // namespace superres::nn::kernels::reference
